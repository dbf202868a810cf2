#include "rsp/collector.hpp"

#include <algorithm>
#include <utility>

namespace rsp {

namespace {

// Append one letter to a working word, merging with the tail and dropping
// cancellations so the adjacency invariant survives.
void append_letter(std::vector<Letter>& w, Gen g, const Int& e) {
  if (sgn(e) == 0) return;
  if (!w.empty() && w.back().gen == g) {
    w.back().exp += e;
    if (sgn(w.back().exp) == 0) w.pop_back();
    return;
  }
  w.emplace_back(g, e);
}

void check_context(const std::vector<Letter>& w, const SubPresentation& ctx) {
  for (const auto& l : w)
    if (l.gen < 1 || l.gen > ctx.k)
      throw std::invalid_argument(
          "word uses generator index " + std::to_string(l.gen) +
          " outside the context of " + std::to_string(ctx.k) + " generators");
}

// Re-establish the adjacency invariant at the boundary between w[b-1] and
// w[b]. Cancellation can expose a new violation one step further left, so
// loop. min_touched tracks the smallest index whose letter changed.
void fix_boundary(std::vector<Letter>& w, std::size_t b,
                  std::size_t& min_touched) {
  while (b > 0 && b < w.size() && w[b - 1].gen == w[b].gen) {
    w[b - 1].exp += w[b].exp;
    w.erase(w.begin() + b);
    min_touched = std::min(min_touched, b - 1);
    if (sgn(w[b - 1].exp) != 0) break;
    w.erase(w.begin() + b - 1);
    --b;
  }
  if (b < min_touched) min_touched = b;
}

class Collector {
 public:
  Collector(const SubPresentation& ctx, const MuTable& tbl,
            const CollectOptions& opts)
      : ctx_(ctx), tbl_(tbl), limit_(opts.step_limit), remaining_(opts.step_limit) {}

  std::uint64_t used() const { return limit_ - remaining_; }

  // Collection from the left. Scans for the leftmost violation; at a given
  // slot an out-of-domain exponent is handled before the pair with the
  // letter to its left, which keeps finite-order letters inside their
  // domain by the time anything moves past them.
  std::vector<Letter> nf(std::vector<Letter> w) {
    std::size_t slot = 0;
    while (slot < w.size()) {
      const Letter& cur = w[slot];
      const GeneratorInfo& gi = ctx_.p->gen(cur.gen);
      if (gi.finite() && (sgn(cur.exp) < 0 || cur.exp >= gi.order)) {
        slot = reduce_exponent(w, slot);
        continue;
      }
      if (slot > 0 && w[slot - 1].gen < cur.gen) {
        slot = move_left(w, slot - 1);
        continue;
      }
      ++slot;
    }
    return w;
  }

  std::vector<Letter> invert_letters(std::vector<Letter> w) {
    std::reverse(w.begin(), w.end());
    for (auto& l : w) l.exp = -l.exp;
    return nf(std::move(w));
  }

  std::vector<Letter> mul_letters(std::vector<Letter> a,
                                  const std::vector<Letter>& b) {
    for (const auto& l : b) append_letter(a, l.gen, l.exp);
    return nf(std::move(a));
  }

  // Normal form of base^e for base already in normal form.
  std::vector<Letter> power_letters(std::vector<Letter> base, Int e) {
    if (base.empty() || sgn(e) == 0) return {};
    if (sgn(e) < 0) {
      base = invert_letters(std::move(base));
      e = -e;
    }
    if (e == 1) return base;
    if (base.size() == 1) {
      std::vector<Letter> w{Letter(base[0].gen, base[0].exp * e)};
      return nf(std::move(w));
    }
    std::vector<Letter> result;
    std::vector<Letter> sq = std::move(base);
    const mp_bitcnt_t nbits = mpz_sizeinbase(e.get_mpz_t(), 2);
    for (mp_bitcnt_t bit = 0; bit < nbits; ++bit) {
      if (mpz_tstbit(e.get_mpz_t(), bit)) result = mul_letters(std::move(result), sq);
      if (bit + 1 < nbits) sq = mul_letters(sq, sq);
    }
    return result;
  }

 private:
  void charge() {
    if (remaining_ == 0)
      throw CollectError(CollectError::Kind::step_limit,
                         "collection exceeded the step limit of " +
                             std::to_string(limit_));
    --remaining_;
  }

  // Replace w[i .. i+count) by repl (which satisfies the adjacency
  // invariant internally) and mend the seams. Returns the smallest index
  // whose letter may have changed; the scan resumes there.
  std::size_t splice(std::vector<Letter>& w, std::size_t i, std::size_t count,
                     std::vector<Letter> repl) {
    const std::size_t len = repl.size();
    w.erase(w.begin() + i, w.begin() + i + count);
    w.insert(w.begin() + i, std::make_move_iterator(repl.begin()),
             std::make_move_iterator(repl.end()));
    std::size_t min_touched = i;
    fix_boundary(w, i + len, min_touched);
    fix_boundary(w, i, min_touched);
    return min_touched;
  }

  // w[i] = x^e with e outside 0..n(x)-1: rewrite to x^r pi(x)^q where
  // e = q n(x) + r, 0 <= r < n(x).
  std::size_t reduce_exponent(std::vector<Letter>& w, std::size_t i) {
    charge();
    const Gen x = w[i].gen;
    Int q, r;
    fdiv_qr(q, r, w[i].exp, ctx_.p->order(x));
    std::vector<Letter> repl;
    if (sgn(r) != 0) repl.emplace_back(x, r);
    std::vector<Letter> tail =
        power_letters(ctx_.p->power_rhs(x).letters(), std::move(q));
    repl.insert(repl.end(), std::make_move_iterator(tail.begin()),
                std::make_move_iterator(tail.end()));
    return splice(w, i, 1, std::move(repl));
  }

  // w[i], w[i+1] = x^a, y^b with x < y: move one y across. For b > 0,
  // x^a y^b -> y delta(x,y)^a y^(b-1); for b < 0 (y of infinite order,
  // finite-order letters are always in domain here),
  // x^a y^b -> y^-1 mu(x,y)^a y^(b+1).
  std::size_t move_left(std::vector<Letter>& w, std::size_t i) {
    charge();
    const Gen x = w[i].gen;
    const Gen y = w[i + 1].gen;
    const Int a = w[i].exp;
    const Int b = w[i + 1].exp;
    std::vector<Letter> repl;
    const bool fwd = sgn(b) > 0;
    // Built with append_letter: when the conjugate collapses to the identity
    // the two y letters must merge or the replacement breaks the invariant.
    append_letter(repl, y, fwd ? Int(1) : Int(-1));
    for (const auto& l : conj_letters(x, a, y, fwd))
      append_letter(repl, l.gen, l.exp);
    append_letter(repl, y, fwd ? Int(b - 1) : Int(b + 1));
    return splice(w, i, 2, std::move(repl));
  }

  // Normal form of (x^a)^y (through_positive) or (x^a)^(y^-1).
  std::vector<Letter> conj_letters(Gen x, const Int& a, Gen y,
                                   bool through_positive) {
    const NormalWord* base;
    if (through_positive) {
      base = &ctx_.p->conj_rhs(x, y);
    } else {
      if (!tbl_.has(x, y))
        throw CollectError(CollectError::Kind::missing_mu,
                           "collection needs the inverse conjugate of ('" +
                               ctx_.p->gen(x).name + "', '" +
                               ctx_.p->gen(y).name +
                               "'), which has not been derived");
      base = &tbl_.mu(x, y);
    }
    const auto& bl = base->letters();
    if (bl.size() == 1 && bl[0].gen == x && bl[0].exp == 1)
      return {Letter(x, a)};  // x and y commute on this side
    if (a == 1) return bl;
    return power_letters(bl, a);
  }

  const SubPresentation& ctx_;
  const MuTable& tbl_;
  std::uint64_t limit_;
  std::uint64_t remaining_;
};

// Runs fn inside a Collector, folding the step count into stats even when
// collection throws.
template <typename Fn>
NormalWord run(const SubPresentation& ctx, const MuTable& tbl,
               const CollectOptions& opts, CollectStats* stats, Fn&& fn) {
  Collector c(ctx, tbl, opts);
  try {
    NormalWord out = NormalWord::from_letters(fn(c));
    if (stats) stats->steps += c.used();
    return out;
  } catch (...) {
    if (stats) stats->steps += c.used();
    throw;
  }
}

}  // namespace

SubPresentation restrict(const RefinedPresentation& p, int k) {
  if (k < 0 || k > p.num_generators())
    throw std::out_of_range("restrict: k out of range");
  return SubPresentation{&p, k};
}

NormalWord collect(const FreeWord& w, const SubPresentation& ctx,
                   const MuTable& tbl, const CollectOptions& opts,
                   CollectStats* stats) {
  check_context(w.letters(), ctx);
  return run(ctx, tbl, opts, stats,
             [&](Collector& c) { return c.nf(w.letters()); });
}

NormalWord multiply(const NormalWord& a, const NormalWord& b,
                    const SubPresentation& ctx, const MuTable& tbl,
                    const CollectOptions& opts, CollectStats* stats) {
  check_context(a.letters(), ctx);
  check_context(b.letters(), ctx);
  return run(ctx, tbl, opts, stats, [&](Collector& c) {
    return c.mul_letters(a.letters(), b.letters());
  });
}

NormalWord invert(const NormalWord& a, const SubPresentation& ctx,
                  const MuTable& tbl, const CollectOptions& opts,
                  CollectStats* stats) {
  check_context(a.letters(), ctx);
  return run(ctx, tbl, opts, stats,
             [&](Collector& c) { return c.invert_letters(a.letters()); });
}

NormalWord power(const NormalWord& a, const Int& e, const SubPresentation& ctx,
                 const MuTable& tbl, const CollectOptions& opts,
                 CollectStats* stats) {
  check_context(a.letters(), ctx);
  return run(ctx, tbl, opts, stats,
             [&](Collector& c) { return c.power_letters(a.letters(), e); });
}

NormalWord conjugate(const NormalWord& a, const NormalWord& b,
                     const SubPresentation& ctx, const MuTable& tbl,
                     const CollectOptions& opts, CollectStats* stats) {
  check_context(a.letters(), ctx);
  check_context(b.letters(), ctx);
  return run(ctx, tbl, opts, stats, [&](Collector& c) {
    std::vector<Letter> w;
    for (auto it = b.letters().rbegin(); it != b.letters().rend(); ++it)
      append_letter(w, it->gen, -it->exp);
    for (const auto& l : a.letters()) append_letter(w, l.gen, l.exp);
    for (const auto& l : b.letters()) append_letter(w, l.gen, l.exp);
    return c.nf(std::move(w));
  });
}

MuTable derive_inverse_conjugates(const SubPresentation& ctx, Gen z,
                                  const MuTable& tbl,
                                  const std::vector<SectionInverse>& inverses,
                                  const CollectOptions& opts,
                                  CollectStats* stats) {
  const RefinedPresentation& p = *ctx.p;
  if (ctx.k != z - 1)
    throw std::invalid_argument(
        "derive_inverse_conjugates: context must expose exactly the "
        "generators below z");
  if (z < 1 || z > p.num_generators() || p.finite(z))
    throw std::invalid_argument(
        "derive_inverse_conjugates: z must be a generator of infinite order");

  // Every generator below z must belong to exactly one supplied section,
  // and sections must arrive in series order so that entries needed for the
  // correction terms already exist.
  std::vector<char> seen(static_cast<std::size_t>(z), 0);
  for (const auto& si : inverses)
    for (Gen g : si.gens) {
      if (g < 1 || g >= z || seen[g])
        throw std::invalid_argument(
            "derive_inverse_conjugates: sections must cover each generator "
            "below z exactly once");
      seen[g] = 1;
    }
  for (Gen g = 1; g < z; ++g)
    if (!seen[g])
      throw std::invalid_argument(
          "derive_inverse_conjugates: sections must cover each generator "
          "below z exactly once");

  MuTable out = tbl;
  for (const auto& si : inverses) {
    const auto& gens = si.gens;
    const int e = static_cast<int>(gens.size());
    const bool finite_sec = si.section.prime != 0;
    if (si.inverse.rows() != e || si.inverse.cols() != e)
      throw std::invalid_argument("derive_inverse_conjugates: matrix shape");

    // Induced action of z on the section: column j lists the exponents of
    // delta(y_j, z) on the section generators.
    Matrix action(e, e);
    for (int j = 0; j < e; ++j) {
      const NormalWord& d = p.conj_rhs(gens[j], z);
      for (int i = 0; i < e; ++i) action.at(i, j) = d.exp(gens[i]);
    }

    // The supplied matrix must invert the action: exactly for an infinite
    // section, entry-wise mod the row generator's order for a finite one
    // (where the action must also be well defined on the product of cyclic
    // groups of possibly different orders).
    Matrix prod = action.mul(si.inverse);
    for (int i = 0; i < e; ++i)
      for (int j = 0; j < e; ++j) {
        if (finite_sec &&
            mod_floor(p.order(gens[j]) * action.at(i, j), p.order(gens[i])) != 0)
          throw MuDeriveError(si.section,
                              "induced action on the section is not well defined");
        Int want = i == j ? 1 : 0;
        bool ok = finite_sec
                      ? mod_floor(prod.at(i, j) - want, p.order(gens[i])) == 0
                      : prod.at(i, j) == want;
        if (!ok)
          throw MuDeriveError(
              si.section, "matrix is not an inverse of the induced action");
      }

    // Letters allowed in the correction term u: anything from an earlier
    // term of the refined series.
    auto in_lower = [&](Gen g) {
      if (p.block_of(g) < si.section.block) return true;
      if (p.block_of(g) != si.section.block || !p.finite(g)) return false;
      return !finite_sec || p.prime_of(g) < si.section.prime;
    };

    for (int i = 0; i < e; ++i) {
      // W = delta(y_e, z)^b(e,i) ... delta(y_1, z)^b(1,i) collapses to
      // y_i * u with u from earlier series terms; then
      // mu(y_i, z) = y_e^b(e,i) ... y_1^b(1,i) * (u conjugated by z^-1)^-1.
      NormalWord w;
      FreeWord front;
      for (int j = e - 1; j >= 0; --j) {
        const Int& bji = si.inverse.at(j, i);
        if (sgn(bji) == 0) continue;
        w = multiply(w, power(p.conj_rhs(gens[j], z), bji, ctx, out, opts, stats),
                     ctx, out, opts, stats);
        front.push(gens[j], bji);
      }
      NormalWord u = multiply(invert(NormalWord::generator(gens[i]), ctx, out,
                                     opts, stats),
                              w, ctx, out, opts, stats);
      for (const auto& l : u.letters())
        if (!in_lower(l.gen))
          throw MuDeriveError(
              si.section,
              "combination for '" + p.gen(gens[i]).name +
                  "' is not congruent to it below z: remainder " +
                  format_word(u, p));
      NormalWord u_conj;
      for (const auto& l : u.letters())
        u_conj = multiply(u_conj, power(out.mu(l.gen, z), l.exp, ctx, out, opts, stats),
                          ctx, out, opts, stats);
      NormalWord value =
          multiply(collect(front, ctx, out, opts, stats),
                   invert(u_conj, ctx, out, opts, stats), ctx, out, opts, stats);
      out.set(gens[i], z, std::move(value));
    }
  }
  return out;
}

}  // namespace rsp
