#include "rsp/matrix.hpp"

#include <utility>

namespace rsp {

Matrix Matrix::mul(const Matrix& rhs) const {
  if (cols_ != rhs.rows_) throw std::invalid_argument("Matrix::mul: shape");
  Matrix out(rows_, rhs.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const Int& v = at(i, k);
      if (sgn(v) == 0) continue;
      for (int j = 0; j < rhs.cols_; ++j) out.at(i, j) += v * rhs.at(k, j);
    }
  return out;
}

Int det_bareiss(Matrix a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("det: not square");
  const int n = a.rows();
  if (n == 0) return 1;
  int sign = 1;
  Int prev = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (sgn(a.at(k, k)) == 0) {
      int piv = -1;
      for (int i = k + 1; i < n; ++i)
        if (sgn(a.at(i, k)) != 0) {
          piv = i;
          break;
        }
      if (piv < 0) return 0;
      for (int j = k; j < n; ++j) std::swap(a.at(k, j), a.at(piv, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) {
        Int t = a.at(i, j) * a.at(k, k) - a.at(i, k) * a.at(k, j);
        // Bareiss: the division is exact.
        mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
        a.at(i, j) = std::move(t);
      }
    prev = a.at(k, k);
  }
  return sign > 0 ? a.at(n - 1, n - 1) : Int(-a.at(n - 1, n - 1));
}

Int det_mod_prime(Matrix a, const Int& p) {
  if (a.rows() != a.cols()) throw std::invalid_argument("det: not square");
  const int n = a.rows();
  Int det = 1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a.at(i, j) = mod_floor(a.at(i, j), p);
  for (int k = 0; k < n; ++k) {
    int piv = -1;
    for (int i = k; i < n; ++i)
      if (sgn(a.at(i, k)) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) return 0;
    if (piv != k) {
      for (int j = k; j < n; ++j) std::swap(a.at(k, j), a.at(piv, j));
      det = p - det;
    }
    det = mod_floor(det * a.at(k, k), p);
    Int inv;
    mod_inverse(inv, a.at(k, k), p);
    for (int i = k + 1; i < n; ++i) {
      if (sgn(a.at(i, k)) == 0) continue;
      Int f = mod_floor(a.at(i, k) * inv, p);
      for (int j = k; j < n; ++j)
        a.at(i, j) = mod_floor(a.at(i, j) - f * a.at(k, j), p);
    }
  }
  return det;
}

std::optional<Matrix> inverse_unimodular(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("inverse: not square");
  const int n = a.rows();
  Int det = det_bareiss(a);
  if (det != 1 && det != -1) return std::nullopt;

  // Gauss-Jordan over the rationals; the result is integral because the
  // determinant is a unit.
  std::vector<std::vector<mpq_class>> w(
      n, std::vector<mpq_class>(2 * n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) w[i][j] = mpq_class(a.at(i, j));
    w[i][n + i] = 1;
  }
  for (int k = 0; k < n; ++k) {
    int piv = -1;
    for (int i = k; i < n; ++i)
      if (sgn(w[i][k]) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) return std::nullopt;
    std::swap(w[k], w[piv]);
    mpq_class inv = 1 / w[k][k];
    for (int j = k; j < 2 * n; ++j) w[k][j] *= inv;
    for (int i = 0; i < n; ++i) {
      if (i == k || sgn(w[i][k]) == 0) continue;
      mpq_class f = w[i][k];
      for (int j = k; j < 2 * n; ++j) w[i][j] -= f * w[k][j];
    }
  }
  Matrix out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      mpq_class v = w[i][n + j];
      v.canonicalize();
      if (v.get_den() != 1) return std::nullopt;
      out.at(i, j) = v.get_num();
    }
  return out;
}

std::optional<Matrix> inverse_mod_prime_power(const Matrix& a, const Int& p,
                                              const Int& m) {
  if (a.rows() != a.cols()) throw std::invalid_argument("inverse: not square");
  const int n = a.rows();
  Matrix w(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) w.at(i, j) = mod_floor(a.at(i, j), m);
    w.at(i, n + i) = 1;
  }
  for (int k = 0; k < n; ++k) {
    // Any entry that is a unit mod p serves as pivot; it stays a unit
    // mod p^e.
    int piv = -1;
    for (int i = k; i < n; ++i)
      if (mod_floor(w.at(i, k), p) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) return std::nullopt;
    if (piv != k)
      for (int j = 0; j < 2 * n; ++j) std::swap(w.at(k, j), w.at(piv, j));
    Int inv;
    if (!mod_inverse(inv, w.at(k, k), m)) return std::nullopt;
    for (int j = 0; j < 2 * n; ++j) w.at(k, j) = mod_floor(w.at(k, j) * inv, m);
    for (int i = 0; i < n; ++i) {
      if (i == k || sgn(w.at(i, k)) == 0) continue;
      Int f = w.at(i, k);
      for (int j = 0; j < 2 * n; ++j)
        w.at(i, j) = mod_floor(w.at(i, j) - f * w.at(k, j), m);
    }
  }
  Matrix out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.at(i, j) = w.at(i, n + j);
  return out;
}

}  // namespace rsp
