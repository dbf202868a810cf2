#pragma once

// Reference models used as oracles: quaternion units, vertex permutations,
// unitriangular matrices and residue tuples, plus a Laplace-expansion
// determinant. Everything here is computed from first principles, with no
// use of the collection machinery under test.

#include <array>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsp/bigint.hpp"
#include "rsp/matrix.hpp"
#include "rsp/presentation.hpp"

namespace models {

using rsp::Int;

// ----- quaternion units ---------------------------------------------------

struct QuatModel {
  using value_type = std::array<long, 4>;  // a + bi + cj + dk

  value_type one() const { return {1, 0, 0, 0}; }
  static value_type i() { return {0, 1, 0, 0}; }
  static value_type j() { return {0, 0, 1, 0}; }

  value_type mul(const value_type& p, const value_type& q) const {
    const auto [a1, b1, c1, d1] = p;
    const auto [a2, b2, c2, d2] = q;
    return {a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2};
  }

  value_type inv(const value_type& p) const {
    // unit quaternions: the conjugate inverts
    return {p[0], -p[1], -p[2], -p[3]};
  }
};

// ----- permutations of n points -------------------------------------------

struct PermModel {
  int n = 0;

  using value_type = std::vector<int>;

  value_type one() const {
    value_type v(n);
    for (int i = 0; i < n; ++i) v[i] = i;
    return v;
  }

  // apply p first, then q
  value_type mul(const value_type& p, const value_type& q) const {
    value_type r(n);
    for (int i = 0; i < n; ++i) r[i] = q[p[i]];
    return r;
  }

  value_type inv(const value_type& p) const {
    value_type r(n);
    for (int i = 0; i < n; ++i) r[p[i]] = i;
    return r;
  }

  value_type rotation() const {
    value_type v(n);
    for (int i = 0; i < n; ++i) v[i] = (i + 1) % n;
    return v;
  }

  value_type reflection() const {
    value_type v(n);
    for (int i = 0; i < n; ++i) v[i] = (n - i) % n;
    return v;
  }
};

// ----- unitriangular n x n matrices, integer or mod p ----------------------

struct MatModel {
  int n = 0;
  long mod = 0;  // 0 = over the integers

  using value_type = std::vector<Int>;  // row-major

  Int reduce(const Int& v) const {
    return mod ? rsp::mod_floor(v, Int(mod)) : v;
  }

  value_type one() const {
    value_type v(static_cast<std::size_t>(n) * n, Int(0));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = 1;
    return v;
  }

  // identity plus v at (i, j), 1-based, i < j
  value_type elementary(int i, int j, long v) const {
    value_type e = one();
    e[static_cast<std::size_t>(i - 1) * n + (j - 1)] = reduce(Int(v));
    return e;
  }

  value_type mul(const value_type& a, const value_type& b) const {
    value_type r(static_cast<std::size_t>(n) * n, Int(0));
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        const Int& v = a[static_cast<std::size_t>(i) * n + k];
        if (sgn(v) == 0) continue;
        for (int j = 0; j < n; ++j)
          r[static_cast<std::size_t>(i) * n + j] +=
              v * b[static_cast<std::size_t>(k) * n + j];
      }
    for (auto& v : r) v = reduce(v);
    return r;
  }

  value_type inv(const value_type& a) const {
    // (I + N)^-1 = I - N + N^2 - ... with N strictly upper triangular.
    value_type nil = a;
    for (int i = 0; i < n; ++i) nil[static_cast<std::size_t>(i) * n + i] -= 1;
    value_type result = one();
    value_type term = one();
    for (int k = 1; k < n; ++k) {
      term = mul(term, nil);
      for (std::size_t t = 0; t < term.size(); ++t) {
        if (k % 2)
          result[t] -= term[t];
        else
          result[t] += term[t];
        result[t] = reduce(result[t]);
      }
    }
    return result;
  }
};

// ----- residue tuples (order 0 = a free integer coordinate) ----------------

struct ResidueModel {
  std::vector<Int> orders;

  using value_type = std::vector<Int>;

  value_type one() const { return value_type(orders.size(), Int(0)); }

  value_type unit(std::size_t i) const {
    value_type v = one();
    v[i] = sgn(orders[i]) != 0 ? rsp::mod_floor(Int(1), orders[i]) : Int(1);
    return v;
  }

  value_type mul(const value_type& a, const value_type& b) const {
    value_type r(orders.size());
    for (std::size_t i = 0; i < orders.size(); ++i) {
      r[i] = a[i] + b[i];
      if (sgn(orders[i]) != 0) r[i] = rsp::mod_floor(r[i], orders[i]);
    }
    return r;
  }

  value_type inv(const value_type& a) const {
    value_type r(orders.size());
    for (std::size_t i = 0; i < orders.size(); ++i) {
      r[i] = -a[i];
      if (sgn(orders[i]) != 0) r[i] = rsp::mod_floor(r[i], orders[i]);
    }
    return r;
  }
};

// ----- generic helpers ------------------------------------------------------

template <typename M>
typename M::value_type model_power(const M& model, typename M::value_type base,
                                   Int e) {
  if (sgn(e) < 0) {
    base = model.inv(base);
    e = -e;
  }
  auto result = model.one();
  while (sgn(e) > 0) {
    if (mpz_odd_p(e.get_mpz_t())) result = model.mul(result, base);
    e >>= 1;
    if (sgn(e) > 0) base = model.mul(base, base);
  }
  return result;
}

// Value of a letter sequence read left to right.
template <typename M>
typename M::value_type model_eval(
    const M& model, const std::vector<rsp::Letter>& letters,
    const std::vector<typename M::value_type>& gen_images) {
  auto acc = model.one();
  for (const auto& l : letters)
    acc = model.mul(
        acc, model_power(model, gen_images.at(static_cast<std::size_t>(l.gen) - 1),
                         l.exp));
  return acc;
}

// Size of the subgroup generated by gens (finite groups only; walks products
// until closed, giving up past cap).
template <typename M>
std::size_t closure_size(const M& model,
                         const std::vector<typename M::value_type>& gens,
                         std::size_t cap) {
  std::set<typename M::value_type> seen{model.one()};
  std::vector<typename M::value_type> queue{model.one()};
  while (!queue.empty()) {
    auto v = std::move(queue.back());
    queue.pop_back();
    for (const auto& g : gens) {
      auto w = model.mul(v, g);
      if (seen.insert(w).second) {
        if (seen.size() > cap) return seen.size();
        queue.push_back(std::move(w));
      }
    }
  }
  return seen.size();
}

// ----- determinant by Laplace expansion -------------------------------------

inline Int det_cofactor(const rsp::Matrix& a) {
  const int n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("det_cofactor: not square");
  if (n == 0) return 1;
  if (n == 1) return a.at(0, 0);
  Int sum = 0;
  for (int j = 0; j < n; ++j) {
    if (sgn(a.at(0, j)) == 0) continue;
    rsp::Matrix minor(n - 1, n - 1);
    for (int r = 1; r < n; ++r) {
      int cc = 0;
      for (int c = 0; c < n; ++c) {
        if (c == j) continue;
        minor.at(r - 1, cc++) = a.at(r, c);
      }
    }
    Int term = a.at(0, j) * det_cofactor(minor);
    sum += j % 2 == 0 ? term : Int(-term);
  }
  return sum;
}

// ----- enumeration of collected words ---------------------------------------

// All normal words of a presentation whose generators all have finite
// order, in mixed-radix order with the first generator's exponent moving
// fastest.
inline std::vector<rsp::NormalWord> enumerate_normal_words(
    const rsp::RefinedPresentation& p, std::size_t cap = 1u << 20) {
  const int m = p.num_generators();
  std::size_t total = 1;
  for (rsp::Gen g = 1; g <= m; ++g) {
    if (!p.finite(g))
      throw std::invalid_argument("enumerate: infinite generator");
    total *= static_cast<std::size_t>(rsp::to_long(p.order(g)));
    if (total > cap) throw std::invalid_argument("enumerate: too many elements");
  }
  std::vector<long> digits(m, 0);
  std::vector<rsp::NormalWord> out;
  out.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::vector<rsp::Letter> letters;
    for (rsp::Gen g = m; g >= 1; --g)
      if (digits[g - 1] != 0) letters.emplace_back(g, Int(digits[g - 1]));
    out.push_back(rsp::NormalWord::from_letters(std::move(letters)));
    for (int g = 0; g < m; ++g) {
      if (++digits[g] < rsp::to_long(p.order(g + 1))) break;
      digits[g] = 0;
    }
  }
  return out;
}

// Images of generators named e{i}_{j} as elementary matrices.
inline std::vector<MatModel::value_type> ut_generator_images(
    const rsp::RefinedPresentation& p, const MatModel& model) {
  std::vector<MatModel::value_type> imgs;
  for (rsp::Gen g = 1; g <= p.num_generators(); ++g) {
    const std::string& name = p.gen(g).name;
    auto us = name.find('_');
    int i = std::stoi(name.substr(1, us - 1));
    int j = std::stoi(name.substr(us + 1));
    imgs.push_back(model.elementary(i, j, 1));
  }
  return imgs;
}

// Dense exponent tuple of a collected word, usable as a map key.
inline std::vector<long> dense_exps(const rsp::NormalWord& w, int m) {
  std::vector<long> v(m, 0);
  for (const auto& l : w.letters()) {
    if (!rsp::fits_long(l.exp))
      throw std::invalid_argument("dense_exps: exponent too large");
    v[l.gen - 1] = rsp::to_long(l.exp);
  }
  return v;
}

}  // namespace models
