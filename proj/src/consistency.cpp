#include "rsp/consistency.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <tuple>
#include <utility>

#include "json.hpp"

namespace rsp {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

bool failure_less(const Failure& a, const Failure& b) {
  return std::tie(a.z, a.condition, a.x, a.y) <
         std::tie(b.z, b.condition, b.x, b.y);
}

std::string section_text(const Section& s) {
  return "(" + std::to_string(s.block) + ", " +
         (s.prime ? std::to_string(s.prime) : std::string("inf")) + ")";
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::consistent: return "consistent";
    case Verdict::inconsistent: return "inconsistent";
    default: return "aborted";
  }
}

const char* to_string(Method m) {
  return m == Method::solv ? "solv" : "overlap";
}

NormalWord apply_delta(const NormalWord& w, const DeltaMap& d,
                       const SubPresentation& ctx, const MuTable& tbl,
                       const CollectOptions& opts, CollectStats* stats) {
  NormalWord out;
  for (const auto& l : w.letters()) {
    if (l.gen >= d.z)
      throw std::invalid_argument(
          "apply_delta: word mentions a generator not below z");
    out = multiply(out,
                   power(d.p->conj_rhs(l.gen, d.z), l.exp, ctx, tbl, opts, stats),
                   ctx, tbl, opts, stats);
  }
  return out;
}

NormalWord apply_map(const NormalWord& w, const GeneratorMap& phi,
                     const SubPresentation& ctx, const MuTable& tbl,
                     const CollectOptions& opts, CollectStats* stats) {
  NormalWord out;
  for (const auto& l : w.letters())
    out = multiply(out, power(phi.image(l.gen), l.exp, ctx, tbl, opts, stats),
                   ctx, tbl, opts, stats);
  return out;
}

InducedMatrix induced_matrix(const RefinedPresentation& p, Gen z, Section s) {
  InducedMatrix out;
  out.section = s;
  out.gens = section_gens(p, s, z);
  const int e = static_cast<int>(out.gens.size());
  out.entries = Matrix(e, e);
  for (int j = 0; j < e; ++j) {
    const NormalWord& d = p.conj_rhs(out.gens[j], z);
    for (int i = 0; i < e; ++i) out.entries.at(i, j) = d.exp(out.gens[i]);
  }
  return out;
}

DetCheck det_check(const InducedMatrix& m, const RefinedPresentation&) {
  DetCheck out;
  if (m.section.prime != 0) {
    out.value = det_mod_prime(m.entries, m.section.prime);
    out.pass = sgn(out.value) != 0;
  } else {
    out.value = det_bareiss(m.entries);
    out.pass = out.value == 1 || out.value == -1;
  }
  return out;
}

SectionInversesResult section_inverses(const RefinedPresentation& p, Gen z) {
  SectionInversesResult out;
  for (const Section& s : sections(p, z)) {
    InducedMatrix im = induced_matrix(p, z, s);
    DetCheck dc = det_check(im, p);
    if (!dc.pass) {
      out.ok = false;
      out.failed_section = s;
      out.failed_det = dc.value;
      return out;
    }
    std::optional<Matrix> inv;
    if (s.prime != 0) {
      Int modulus = 1;
      for (Gen g : im.gens)
        if (p.order(g) > modulus) modulus = p.order(g);
      inv = inverse_mod_prime_power(im.entries, s.prime, modulus);
    } else {
      inv = inverse_unimodular(im.entries);
    }
    if (!inv)
      throw std::logic_error(
          "section_inverses: invertibility check passed but inversion failed");
    out.inverses.push_back({s, im.gens, std::move(*inv)});
  }
  out.ok = true;
  return out;
}

// ---------------------------------------------------------------------------
// Determinant-based checker.

namespace {

struct Instance {
  int cond = 0;
  Gen x = 0;
  Gen y = 0;
};

// Evaluates one condition instance for generator z inside the subgroup of
// everything below z. Returns the failure witness, if any.
std::optional<Failure> eval_condition(const RefinedPresentation& p, Gen z,
                                      const Instance& ins,
                                      const SubPresentation& ctx,
                                      const MuTable& mu,
                                      const CollectOptions& copts,
                                      CollectStats* st) {
  const DeltaMap dz{&p, z};
  switch (ins.cond) {
    case 1: {
      // pi(z) is fixed by conjugation with z.
      const NormalWord& pi = p.power_rhs(z);
      NormalWord l = apply_delta(pi, dz, ctx, mu, copts, st);
      if (l != pi)
        return Failure{"1", z, 0, 0, format_word(l, p), format_word(pi, p), ""};
      return std::nullopt;
    }
    case 2: {
      // Conjugating the power relation of x by z keeps it a power relation.
      const Gen x = ins.x;
      NormalWord l = apply_delta(p.power_rhs(x), dz, ctx, mu, copts, st);
      NormalWord r = power(p.conj_rhs(x, z), p.order(x), ctx, mu, copts, st);
      if (l != r)
        return Failure{"2", z, x, 0, format_word(l, p), format_word(r, p), ""};
      return std::nullopt;
    }
    case 3: {
      // Applying the conjugation map n(z) times equals conjugation by pi(z).
      const Gen x = ins.x;
      NormalWord l = NormalWord::generator(x);
      for (Int i = 0; i < p.order(z); ++i) l = apply_delta(l, dz, ctx, mu, copts, st);
      NormalWord r =
          conjugate(NormalWord::generator(x), p.power_rhs(z), ctx, mu, copts, st);
      if (l != r)
        return Failure{"3", z, x, 0, format_word(l, p), format_word(r, p), ""};
      return std::nullopt;
    }
    case 4: {
      // The conjugation map respects the relation x^y = delta(x,y).
      const Gen x = ins.x;
      const Gen y = ins.y;
      NormalWord l = apply_delta(p.conj_rhs(x, y), dz, ctx, mu, copts, st);
      NormalWord r =
          conjugate(p.conj_rhs(x, z), p.conj_rhs(y, z), ctx, mu, copts, st);
      if (l != r)
        return Failure{"4", z, x, y, format_word(l, p), format_word(r, p), ""};
      return std::nullopt;
    }
    default:
      throw std::logic_error("eval_condition: bad instance");
  }
}

struct BatchResult {
  std::vector<Failure> failures;
  std::uint64_t steps = 0;
  bool aborted = false;
  std::string abort_msg;
};

// Shared driver for the condition loops: evaluates all instances with the
// same kernel either sequentially or under OpenMP, merging failures into a
// deterministic order.
template <typename Eval>
BatchResult run_batch(std::int64_t n, bool parallel, Eval&& eval) {
  BatchResult out;
  std::uint64_t steps_total = 0;
  std::atomic<bool> aborted{false};
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : steps_total) \
    if (parallel)
  for (std::int64_t t = 0; t < n; ++t) {
    if (aborted.load(std::memory_order_relaxed)) continue;
    CollectStats st;
    try {
      std::optional<Failure> f = eval(t, &st);
      if (f) {
#pragma omp critical(rsp_batch_failures)
        out.failures.push_back(std::move(*f));
      }
    } catch (const std::exception& e) {
      aborted.store(true, std::memory_order_relaxed);
#pragma omp critical(rsp_batch_failures)
      out.abort_msg = e.what();
    }
    steps_total += st.steps;
  }
  out.steps = steps_total;
  out.aborted = aborted.load();
  std::sort(out.failures.begin(), out.failures.end(), failure_less);
  return out;
}

Failure det_failure(Gen z, const Section& s, const DetCheck& dc) {
  std::string detail = "section " + section_text(s) + ": det = ";
  if (s.prime != 0)
    detail += to_string(dc.value) + " (mod " + std::to_string(s.prime) + ")";
  else
    detail += to_string(dc.value);
  return Failure{"5", z, 0, 0, "", "", detail};
}

}  // namespace

ConsistencyReport check_solv(const RefinedPresentation& p,
                                 const CheckOptions& opts, MuTable* mu_out) {
  const auto t0 = Clock::now();
  ConsistencyReport rep;
  rep.method = Method::solv;
  const CollectOptions copts{opts.step_limit};
  const int m = p.num_generators();
  MuTable mu;

  Gen first_fail_z = 0;
  std::vector<Failure> first_fails;

  for (Gen z = 2; z <= m; ++z) {
    const SubPresentation ctx = restrict(p, z - 1);
    std::vector<Failure> zfails;

    // Condition 5: invertible induced action on every full section below
    // the block of z. Cheap, no collection involved.
    for (const Section& s : sections(p, z)) {
      if (s.block >= p.block_of(z)) continue;
      DetCheck dc = det_check(induced_matrix(p, z, s), p);
      if (!dc.pass) zfails.push_back(det_failure(z, s, dc));
    }

    // Conditions 1-4 as a flat instance list.
    std::vector<Instance> tasks;
    if (p.finite(z)) tasks.push_back({1, 0, 0});
    for (Gen x = 1; x < z; ++x) {
      if (p.finite(x)) tasks.push_back({2, x, 0});
      if (p.finite(z)) tasks.push_back({3, x, 0});
    }
    for (Gen y = 2; y < z; ++y)
      for (Gen x = 1; x < y; ++x) tasks.push_back({4, x, y});

    BatchResult batch = run_batch(
        static_cast<std::int64_t>(tasks.size()), opts.parallel,
        [&](std::int64_t t, CollectStats* st) {
          return eval_condition(p, z, tasks[static_cast<std::size_t>(t)], ctx,
                                mu, copts, st);
        });
    rep.steps += batch.steps;
    if (batch.aborted) {
      if (first_fail_z) break;  // already inconsistent; stop quietly
      rep.verdict = Verdict::aborted;
      rep.diagnostic = "while checking z = '" + p.gen(z).name +
                       "': " + batch.abort_msg;
      rep.elapsed_ms = ms_since(t0);
      if (mu_out) *mu_out = std::move(mu);
      return rep;
    }
    zfails.insert(zfails.end(), batch.failures.begin(), batch.failures.end());
    std::sort(zfails.begin(), zfails.end(), failure_less);

    if (!zfails.empty() && !first_fail_z) {
      first_fail_z = z;
      first_fails = std::move(zfails);
      if (opts.mode == CheckMode::incremental) break;
    }

    // Keep the inverse conjugate table in step with the verified prefix so
    // the next rounds can collect across z.
    if (!p.finite(z)) {
      SectionInversesResult inv = section_inverses(p, z);
      if (!inv.ok) {
        // Condition 5 covers every full section, so this can only be the
        // partial top block of an already failing presentation.
        if (first_fail_z) break;
        rep.verdict = Verdict::inconsistent;
        rep.failures.push_back(
            det_failure(z, inv.failed_section,
                        DetCheck{false, inv.failed_det}));
        rep.elapsed_ms = ms_since(t0);
        if (mu_out) *mu_out = std::move(mu);
        return rep;
      }
      CollectStats st;
      try {
        mu = derive_inverse_conjugates(ctx, z, mu, inv.inverses, copts, &st);
        rep.steps += st.steps;
      } catch (const std::exception& e) {
        rep.steps += st.steps;
        if (first_fail_z) break;
        rep.verdict = Verdict::aborted;
        rep.diagnostic = "while deriving inverse conjugates for z = '" +
                         p.gen(z).name + "': " + e.what();
        rep.elapsed_ms = ms_since(t0);
        if (mu_out) *mu_out = std::move(mu);
        return rep;
      }
    }
  }

  if (first_fail_z) {
    rep.verdict = Verdict::inconsistent;
    rep.failures = std::move(first_fails);
  }
  rep.elapsed_ms = ms_since(t0);
  if (mu_out) *mu_out = std::move(mu);
  return rep;
}

// ---------------------------------------------------------------------------
// Overlap checker.

namespace {

struct OverlapTask {
  char fam = 0;
  Gen x = 0;
  Gen y = 0;
  Gen z = 0;
};

std::optional<Failure> eval_overlap(const RefinedPresentation& p,
                                    const OverlapTask& t,
                                    const SubPresentation& ctx,
                                    const MuTable& mu,
                                    const CollectOptions& copts,
                                    CollectStats* st) {
  auto words_differ = [&](const NormalWord& l, const NormalWord& r,
                          const char* fam, Gen fz, Gen fx,
                          Gen fy) -> std::optional<Failure> {
    if (l == r) return std::nullopt;
    return Failure{fam, fz, fx, fy, format_word(l, p), format_word(r, p), ""};
  };
  switch (t.fam) {
    case 'a': {
      // x y z: resolve (x, y) first or (y, z) first.
      FreeWord lw;
      lw.push(t.x, 1);
      lw.push(t.y, 1);
      lw.push(t.z, 1);
      FreeWord rw;
      rw.push(t.x, 1);
      rw.push(t.z, 1);
      for (const auto& l : p.conj_rhs(t.y, t.z).letters()) rw.push(l);
      return words_differ(collect(lw, ctx, mu, copts, st),
                          collect(rw, ctx, mu, copts, st), "a", t.z, t.x, t.y);
    }
    case 'b': {
      // x y^n(y): reduce the power first or move x across one y first. The
      // power route is substituted by hand because left-to-right collection
      // of x y^n would take the conjugacy route, same as the right side.
      const Int& n = p.order(t.y);
      FreeWord lw;
      lw.push(t.x, 1);
      for (const auto& l : p.power_rhs(t.y).letters()) lw.push(l);
      FreeWord rw;
      rw.push(t.y, 1);
      for (const auto& l : p.conj_rhs(t.x, t.y).letters()) rw.push(l);
      rw.push(t.y, n - 1);
      return words_differ(collect(lw, ctx, mu, copts, st),
                          collect(rw, ctx, mu, copts, st), "b", 0, t.x, t.y);
    }
    case 'c': {
      // x^n(x) y: reduce the power first or split one x off to the right.
      const Int& n = p.order(t.x);
      FreeWord lw;
      lw.push(t.x, n);
      lw.push(t.y, 1);
      FreeWord rw;
      rw.push(t.x, n - 1);
      rw.push(t.y, 1);
      for (const auto& l : p.conj_rhs(t.x, t.y).letters()) rw.push(l);
      return words_differ(collect(lw, ctx, mu, copts, st),
                          collect(rw, ctx, mu, copts, st), "c", 0, t.x, t.y);
    }
    case 'd': {
      // x^(n(x)+1): peel the power relation off at either end.
      FreeWord lw;
      lw.push(t.x, p.order(t.x) + 1);
      FreeWord rw;
      for (const auto& l : p.power_rhs(t.x).letters()) rw.push(l);
      rw.push(t.x, 1);
      return words_differ(collect(lw, ctx, mu, copts, st),
                          collect(rw, ctx, mu, copts, st), "d", 0, t.x, 0);
    }
    case 'e': {
      // Conjugating by y then y^-1 (and the other way) returns x.
      const NormalWord xw = NormalWord::generator(t.x);
      FreeWord fw;
      fw.push(t.y, 1);
      for (const auto& l : p.conj_rhs(t.x, t.y).letters()) fw.push(l);
      fw.push(t.y, -1);
      if (auto f = words_differ(collect(fw, ctx, mu, copts, st), xw, "e", 0,
                                t.x, t.y))
        return f;
      FreeWord bw;
      bw.push(t.y, -1);
      for (const auto& l : mu.mu(t.x, t.y).letters()) bw.push(l);
      bw.push(t.y, 1);
      return words_differ(collect(bw, ctx, mu, copts, st), xw, "e", 0, t.x,
                          t.y);
    }
    default:
      throw std::logic_error("eval_overlap: bad task");
  }
}

}  // namespace

ConsistencyReport check_overlap(const RefinedPresentation& p,
                                const CheckOptions& opts) {
  const auto t0 = Clock::now();
  ConsistencyReport rep;
  rep.method = Method::overlap;
  const CollectOptions copts{opts.step_limit};
  const int m = p.num_generators();
  MuTable mu;

  // The rules for pushing letters past a negative power come from the
  // derived inverse conjugates, so build the full table first. Any failure
  // on the way witnesses inconsistency (singular induced action or a
  // combination that misses its target generator).
  for (Gen z = 1; z <= m; ++z) {
    if (p.finite(z)) continue;
    SectionInversesResult inv = section_inverses(p, z);
    if (!inv.ok) {
      rep.verdict = Verdict::inconsistent;
      std::string detail = "singular induced action on section " +
                           section_text(inv.failed_section) + ": det = " +
                           to_string(inv.failed_det);
      if (inv.failed_section.prime != 0)
        detail += " (mod " + std::to_string(inv.failed_section.prime) + ")";
      rep.failures.push_back(Failure{"e", z, 0, 0, "", "", detail});
      rep.elapsed_ms = ms_since(t0);
      return rep;
    }
    CollectStats st;
    try {
      mu = derive_inverse_conjugates(restrict(p, z - 1), z, mu, inv.inverses,
                                     copts, &st);
      rep.steps += st.steps;
    } catch (const MuDeriveError& e) {
      rep.steps += st.steps;
      rep.verdict = Verdict::inconsistent;
      rep.failures.push_back(Failure{"e", z, 0, 0, "", "", e.what()});
      rep.elapsed_ms = ms_since(t0);
      return rep;
    } catch (const std::exception& e) {
      rep.steps += st.steps;
      rep.verdict = Verdict::aborted;
      rep.diagnostic = "while deriving inverse conjugates for z = '" +
                       p.gen(z).name + "': " + e.what();
      rep.elapsed_ms = ms_since(t0);
      return rep;
    }
  }

  const SubPresentation ctx = whole(p);
  std::vector<OverlapTask> tasks;
  for (Gen x = 1; x <= m; ++x)
    if (p.finite(x)) tasks.push_back({'d', x, 0, 0});
  for (Gen y = 2; y <= m; ++y)
    for (Gen x = 1; x < y; ++x) {
      if (p.finite(y))
        tasks.push_back({'b', x, y, 0});
      else
        tasks.push_back({'e', x, y, 0});
      if (p.finite(x)) tasks.push_back({'c', x, y, 0});
    }
  for (Gen z = 3; z <= m; ++z)
    for (Gen y = 2; y < z; ++y)
      for (Gen x = 1; x < y; ++x) tasks.push_back({'a', x, y, z});

  BatchResult batch = run_batch(
      static_cast<std::int64_t>(tasks.size()), opts.parallel,
      [&](std::int64_t t, CollectStats* st) {
        return eval_overlap(p, tasks[static_cast<std::size_t>(t)], ctx, mu,
                            copts, st);
      });
  rep.steps += batch.steps;
  if (batch.aborted) {
    rep.verdict = Verdict::aborted;
    rep.diagnostic = batch.abort_msg;
  } else if (!batch.failures.empty()) {
    rep.verdict = Verdict::inconsistent;
    rep.failures = std::move(batch.failures);
  }
  rep.elapsed_ms = ms_since(t0);
  return rep;
}

MethodComparison compare_methods(const RefinedPresentation& p,
                                 const CheckOptions& opts) {
  MethodComparison out;
  out.solv = check_solv(p, opts);
  out.overlap = check_overlap(p, opts);
  out.agree = out.solv.verdict == out.overlap.verdict;
  return out;
}

AutomorphismReport check_automorphism(const RefinedPresentation& p,
                                      const GeneratorMap& phi,
                                      const MuTable& tbl,
                                      const CheckOptions& opts) {
  AutomorphismReport rep;
  const SubPresentation ctx = whole(p);
  const CollectOptions copts{opts.step_limit};
  const int m = p.num_generators();
  if (static_cast<int>(phi.images.size()) != m)
    throw std::invalid_argument("check_automorphism: image count mismatch");

  for (Gen x = 1; x <= m; ++x) {
    if (!p.finite(x)) continue;
    NormalWord l = apply_map(p.power_rhs(x), phi, ctx, tbl, copts, nullptr);
    NormalWord r = power(phi.image(x), p.order(x), ctx, tbl, copts, nullptr);
    if (l != r)
      rep.failures.push_back(
          Failure{"pow", 0, x, 0, format_word(l, p), format_word(r, p), ""});
  }
  for (Gen y = 2; y <= m; ++y)
    for (Gen x = 1; x < y; ++x) {
      NormalWord l = apply_map(p.conj_rhs(x, y), phi, ctx, tbl, copts, nullptr);
      NormalWord r =
          conjugate(phi.image(x), phi.image(y), ctx, tbl, copts, nullptr);
      if (l != r)
        rep.failures.push_back(
            Failure{"cnj", 0, x, y, format_word(l, p), format_word(r, p), ""});
    }

  // Bijectivity on each graded piece: the matrix of phi's exponents on a
  // section must be invertible over the right coefficients.
  for (const Section& s : sections(p)) {
    std::vector<Gen> gens = section_gens(p, s);
    const int e = static_cast<int>(gens.size());
    Matrix mat(e, e);
    for (int j = 0; j < e; ++j)
      for (int i = 0; i < e; ++i)
        mat.at(i, j) = phi.image(gens[j]).exp(gens[i]);
    DetCheck dc;
    if (s.prime != 0) {
      dc.value = det_mod_prime(mat, s.prime);
      dc.pass = sgn(dc.value) != 0;
    } else {
      dc.value = det_bareiss(mat);
      dc.pass = dc.value == 1 || dc.value == -1;
    }
    if (!dc.pass) {
      std::string detail = "section " + section_text(s) + ": det = " +
                           to_string(dc.value);
      if (s.prime != 0) detail += " (mod " + std::to_string(s.prime) + ")";
      rep.failures.push_back(Failure{"det", 0, 0, 0, "", "", detail});
    }
  }
  rep.ok = rep.failures.empty();
  return rep;
}

// ---------------------------------------------------------------------------
// Rendering.

namespace {

std::string gen_name(const RefinedPresentation& p, Gen g) {
  return g ? p.gen(g).name : std::string();
}

std::string failure_line(const Failure& f, const RefinedPresentation& p) {
  std::string s = "condition " + f.condition;
  if (f.z) s += " at z=" + gen_name(p, f.z);
  if (f.x || f.y) {
    s += " (";
    if (f.x) s += "x=" + gen_name(p, f.x);
    if (f.y) s += std::string(f.x ? ", " : "") + "y=" + gen_name(p, f.y);
    s += ")";
  }
  if (!f.left.empty() || !f.right.empty())
    s += ": left = " + f.left + ", right = " + f.right;
  if (!f.detail.empty()) s += ": " + f.detail;
  return s;
}

nlohmann::json failure_json(const Failure& f, const RefinedPresentation& p) {
  return nlohmann::json{
      {"condition", f.condition}, {"z", gen_name(p, f.z)},
      {"x", gen_name(p, f.x)},    {"y", gen_name(p, f.y)},
      {"left", f.left},           {"right", f.right},
      {"detail", f.detail},
  };
}

nlohmann::json report_json(const ConsistencyReport& r,
                           const RefinedPresentation& p) {
  nlohmann::json fails = nlohmann::json::array();
  for (const auto& f : r.failures) fails.push_back(failure_json(f, p));
  return nlohmann::json{
      {"method", to_string(r.method)},   {"verdict", to_string(r.verdict)},
      {"failures", std::move(fails)},    {"elapsed_ms", r.elapsed_ms},
      {"steps", r.steps},                {"diagnostic", r.diagnostic},
  };
}

}  // namespace

std::string report_to_text(const ConsistencyReport& r,
                           const RefinedPresentation& p) {
  std::string out = std::string("method ") + to_string(r.method) + ": " +
                    to_string(r.verdict);
  char buf[64];
  std::snprintf(buf, sizeof buf, " (%.1f ms, ", r.elapsed_ms);
  out += buf;
  out += std::to_string(r.steps) + " steps)";
  if (!r.diagnostic.empty()) out += "\n  " + r.diagnostic;
  for (const auto& f : r.failures) out += "\n  " + failure_line(f, p);
  return out;
}

std::string report_to_json(const ConsistencyReport& r,
                           const RefinedPresentation& p) {
  return report_json(r, p).dump(2);
}

std::string comparison_to_json(const MethodComparison& c,
                               const RefinedPresentation& p) {
  return nlohmann::json{{"solv", report_json(c.solv, p)},
                        {"overlap", report_json(c.overlap, p)},
                        {"agree", c.agree}}
      .dump(2);
}

}  // namespace rsp
