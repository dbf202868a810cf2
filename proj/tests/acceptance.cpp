// End-to-end acceptance checks. Each criterion prints one [PASS]/[FAIL]
// line; the exit code is the number of failed criteria. Limits are pinned
// here so a regression in behaviour or performance flips the line to FAIL.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "models.hpp"
#include "rsp/collector.hpp"
#include "rsp/consistency.hpp"
#include "rsp/corpus.hpp"
#include "rsp/presentation.hpp"

using namespace rsp;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Pinned limits and sizes.
constexpr double kWitnessLimitMs = 1'000.0;          // criterion 1
constexpr double kTableLimitMs = 30'000.0;           // criterion 2
constexpr double kCorpusLimitMs = 600'000.0;         // criterion 3
constexpr double kTruncateLimitMs = 600'000.0;       // criterion 4
constexpr double kInverseLimitMs = 300'000.0;        // criterion 5
constexpr double kBenchPerInputLimitMs = 600'000.0;  // criterion 6, per record
constexpr double kBenchWallLimitMs = 3'600'000.0;
constexpr double kAutoLimitMs = 120'000.0;           // criterion 7
constexpr int kTowerCount = 100;
constexpr int kMutantCount = 100;
constexpr int kTruncationCap = 20;
constexpr int kRandomElements = 1000;
constexpr int kAutoGroups = 20;
constexpr long kAutoOrderCap = 4096;

const char* kTwoGen =
    "rsp 1\n"
    "gen x1 block 1 order inf\n"
    "gen x2 block 2 order inf\n"
    "cnj x1 x2 = x1^2\n";

NormalWord random_element(const RefinedPresentation& p, std::mt19937_64& rng) {
  std::vector<Letter> ls;
  for (Gen g = p.num_generators(); g >= 1; --g) {
    long e;
    if (p.finite(g))
      e = std::uniform_int_distribution<long>(0, to_long(p.order(g)) - 1)(rng);
    else
      e = std::uniform_int_distribution<long>(-20, 20)(rng);
    if (e) ls.emplace_back(g, Int(e));
  }
  return NormalWord::from_letters(std::move(ls));
}

RefinedPresentation heisenberg_variant() {
  ExtensionSpec spec;
  spec.base = family_free_abelian(2);
  spec.phi.images = {NormalWord::generator(1),
                     NormalWord::from_letters({{2, 1}, {1, 1}})};
  spec.kind = InfiniteCyclicKind{};
  return extend_infinite(spec);
}

// ----- criterion 1: the motivating witness -----------------------------------

bool criterion1(std::string& note) {
  auto p = parse(kTwoGen);

  auto t0 = Clock::now();
  auto solv = check_solv(p);
  double solv_ms = ms_since(t0);
  t0 = Clock::now();
  auto over = check_overlap(p);
  double over_ms = ms_since(t0);

  const Failure want{"5", 2, 0, 0, "", "", "section (1, inf): det = 2"};
  if (solv.verdict != Verdict::inconsistent || solv.failures.size() != 1 ||
      !(solv.failures[0] == want)) {
    note = "determinant checker did not produce the pinned witness: " +
           report_to_text(solv, p);
    return false;
  }
  if (over.verdict != Verdict::inconsistent || over.failures.size() != 1 ||
      over.failures[0].condition != "e" || over.failures[0].z != 2 ||
      over.failures[0].detail.find("det = 2") == std::string::npos) {
    note = "overlap checker did not produce the expected witness: " +
           report_to_text(over, p);
    return false;
  }
  if (solv_ms > kWitnessLimitMs || over_ms > kWitnessLimitMs) {
    note = "witness found but too slowly";
    return false;
  }
  note = "both checkers reject the two-generator example with the pinned "
         "det = 2 witness";
  return true;
}

// ----- criterion 2: multiplication tables against reference models -----------

template <typename M>
bool table_isomorphism(const RefinedPresentation& p, const M& model,
                       const std::vector<typename M::value_type>& imgs,
                       std::string& why) {
  MuTable mu;
  if (check_solv(p, {}, &mu).verdict != Verdict::consistent) {
    why = "not consistent";
    return false;
  }
  auto ctx = whole(p);
  auto els = models::enumerate_normal_words(p);
  const std::size_t n = els.size();
  const int m = p.num_generators();

  std::map<std::vector<long>, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index[models::dense_exps(els[i], m)] = i;

  std::vector<std::vector<std::size_t>> t(n, std::vector<std::size_t>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      auto prod = multiply(els[i], els[j], ctx, mu);
      auto it = index.find(models::dense_exps(prod, m));
      if (it == index.end()) {
        why = "product left the enumerated set";
        return false;
      }
      t[i][j] = it->second;
    }

  const std::size_t e = index.at(std::vector<long>(m, 0));
  for (std::size_t i = 0; i < n; ++i)
    if (t[e][i] != i || t[i][e] != i) {
      why = "identity law fails";
      return false;
    }
  for (std::size_t i = 0; i < n; ++i) {
    bool found = false;
    for (std::size_t j = 0; j < n && !found; ++j)
      found = t[i][j] == e && t[j][i] == e;
    if (!found) {
      why = "inverse law fails";
      return false;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (t[t[i][j]][k] != t[i][t[j][k]]) {
          why = "associativity fails";
          return false;
        }

  if (models::closure_size(model, imgs, n + 1) != n) {
    why = "model subgroup has a different order";
    return false;
  }
  std::vector<typename M::value_type> mv(n);
  for (std::size_t i = 0; i < n; ++i)
    mv[i] = models::model_eval(model, els[i].letters(), imgs);
  if (std::set<typename M::value_type>(mv.begin(), mv.end()).size() != n) {
    why = "generator map is not injective";
    return false;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!(mv[t[i][j]] == model.mul(mv[i], mv[j]))) {
        why = "generator map is not a homomorphism";
        return false;
      }
  return true;
}

bool criterion2(std::string& note) {
  std::string why;
  long total = 0;

  auto fail = [&](const char* name) {
    note = std::string(name) + ": " + why;
    return false;
  };

  {
    auto p = family_cyclic(12);
    models::ResidueModel model{{Int(4), Int(3)}};
    if (!table_isomorphism(p, model, {model.unit(0), model.unit(1)}, why))
      return fail("cyclic(12)");
    total += 12;
  }
  {
    auto p = family_quaternion8();
    models::QuatModel model;
    if (!table_isomorphism(p, model, {model.i(), model.j()}, why))
      return fail("quaternion8");
    total += 8;
  }
  {
    auto p = family_dihedral(16);
    models::PermModel model{8};
    if (!table_isomorphism(p, model, {model.rotation(), model.reflection()},
                           why))
      return fail("dihedral(16)");
    total += 16;
  }
  for (auto [n, q] : {std::pair<int, long>{3, 2}, {3, 3}, {4, 2}}) {
    auto p = family_ut(n, q);
    models::MatModel model{n, q};
    if (!table_isomorphism(p, model, models::ut_generator_images(p, model),
                           why)) {
      why = "ut(" + std::to_string(n) + "," + std::to_string(q) + "): " + why;
      return fail("ut");
    }
    Int sz = 1;
    for (Gen g = 1; g <= p.num_generators(); ++g) sz *= p.order(g);
    total += to_long(sz);
  }

  note = "6 groups (" + std::to_string(total) +
         " elements in total): tables satisfy the group laws and the "
         "generator maps are isomorphisms onto the reference models";
  return true;
}

// ----- criteria 3 and 4: corpus agreement and truncation ----------------------

struct CorpusShared {
  // Inconsistent mutants with the smallest failing generator, for criterion 4.
  std::vector<std::pair<RefinedPresentation, Gen>> inconsistent;
  bool built = false;
};

bool criterion3(std::string& note, CorpusShared& shared) {
  std::vector<RefinedPresentation> towers;
  towers.reserve(kTowerCount);
  for (int seed = 1; seed <= kTowerCount; ++seed)
    towers.push_back(random_tower(seed, seed % 8 + 1));

  std::vector<RefinedPresentation> items = towers;
  items.reserve(kTowerCount + kMutantCount);
  for (int i = 0; i < kMutantCount; ++i) {
    auto m = mutate(towers[i], 1000 + i);
    if (!m.changed) m = mutate(towers[i], 100000 + i);
    items.push_back(std::move(m.presentation));
  }

  int n_inconsistent = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto cmp = compare_methods(items[i]);
    if (cmp.solv.verdict == Verdict::aborted ||
        cmp.overlap.verdict == Verdict::aborted) {
      note = "item " + std::to_string(i + 1) + " aborted: " +
             (cmp.solv.verdict == Verdict::aborted ? cmp.solv.diagnostic
                                                   : cmp.overlap.diagnostic);
      return false;
    }
    if (!cmp.agree) {
      note = "methods disagree on item " + std::to_string(i + 1) + ": solv " +
             to_string(cmp.solv.verdict) + ", overlap " +
             to_string(cmp.overlap.verdict);
      return false;
    }
    if (cmp.solv.verdict == Verdict::inconsistent) {
      ++n_inconsistent;
      if (i >= static_cast<std::size_t>(kTowerCount) &&
          static_cast<int>(shared.inconsistent.size()) < kTruncationCap)
        shared.inconsistent.emplace_back(items[i], cmp.solv.failures.front().z);
    }
  }

  shared.built = true;
  note = std::to_string(items.size()) +
         " presentations (100 towers, 100 mutants): both methods agree "
         "everywhere, " +
         std::to_string(n_inconsistent) + " inconsistent";
  return true;
}

bool criterion4(std::string& note, const CorpusShared& shared) {
  if (!shared.built) {
    note = "corpus from criterion 3 unavailable";
    return false;
  }
  if (shared.inconsistent.empty()) {
    note = "no inconsistent mutant to truncate";
    return false;
  }
  for (const auto& [p, z] : shared.inconsistent) {
    if (z < 2) {
      note = "failure reported below the second generator";
      return false;
    }
    auto t = truncate(p, z - 1);
    auto cmp = compare_methods(t);
    if (cmp.solv.verdict != Verdict::consistent ||
        cmp.overlap.verdict != Verdict::consistent) {
      note = "presentation truncated below its smallest failing generator is "
             "still rejected";
      return false;
    }
  }
  note = std::to_string(shared.inconsistent.size()) +
         " inconsistent mutants are consistent when truncated below the "
         "smallest failing generator";
  return true;
}

// ----- criterion 5: inverse conjugates and inverse round trips ----------------

bool criterion5(std::string& note) {
  std::vector<RefinedPresentation> ps = {
      family_heisenberg(), family_free_abelian(3), heisenberg_variant()};
  for (std::uint64_t seed : {11ull, 22ull, 33ull})
    ps.push_back(random_tower(seed, 6));

  int mu_pairs = 0;
  long elements = 0;
  for (const auto& p : ps) {
    MuTable mu;
    if (check_solv(p, {}, &mu).verdict != Verdict::consistent) {
      note = "expected-consistent input rejected";
      return false;
    }
    auto ctx = whole(p);
    const int m = p.num_generators();

    for (Gen y = 2; y <= m; ++y) {
      if (p.finite(y)) continue;
      for (Gen x = 1; x < y; ++x) {
        FreeWord back;
        back.push(y, -1);
        for (const auto& l : mu.mu(x, y).letters()) back.push(l);
        back.push(y, 1);
        if (collect(back, ctx, mu) != NormalWord::generator(x)) {
          note = "mu entry fails its defining identity";
          return false;
        }
        FreeWord fwd;
        fwd.push(y, 1);
        for (const auto& l : p.conj_rhs(x, y).letters()) fwd.push(l);
        fwd.push(y, -1);
        if (collect(fwd, ctx, mu) != NormalWord::generator(x)) {
          note = "conjugacy relation fails its round trip";
          return false;
        }
        ++mu_pairs;
      }
    }

    std::mt19937_64 rng(4242);
    for (int i = 0; i < kRandomElements; ++i) {
      auto g = random_element(p, rng);
      if (!multiply(g, invert(g, ctx, mu), ctx, mu).is_identity() ||
          !multiply(invert(g, ctx, mu), g, ctx, mu).is_identity()) {
        note = "g * g^-1 is not the identity";
        return false;
      }
      if (invert(invert(g, ctx, mu), ctx, mu) != g) {
        note = "double inverse moved an element";
        return false;
      }
      ++elements;
    }
  }
  note = std::to_string(mu_pairs) + " inverse conjugate round trips and " +
         std::to_string(elements) + " random inverse checks hold";
  return true;
}

// ----- criterion 6: the bench pipeline through the installed binary -----------

bool criterion6(std::string& note) {
  const char* cli = std::getenv("RSP_CLI");
  if (!cli || !*cli) {
    note = "RSP_CLI is not set";
    return false;
  }
  const std::string out = "acceptance_bench.json";
  const std::string cmd = std::string("\"") + cli +
                          "\" bench --json --reps 1 --methods solv overlap "
                          "--inputs \"ut(12,2)\" \"ut(16,2)\" \"ut(20,2)\" > " +
                          out + " 2> acceptance_bench.err";
  int rc = std::system(cmd.c_str());
  if (rc != 0) {
    note = "bench run failed with status " + std::to_string(rc);
    return false;
  }

  std::ifstream in(out);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    note = std::string("bench output is not valid JSON: ") + e.what();
    return false;
  }
  if (!j.is_array() || j.size() != 6) {
    note = "expected 6 bench records";
    return false;
  }

  const std::map<std::string, int> want_gens{
      {"ut(12,2)", 66}, {"ut(16,2)", 120}, {"ut(20,2)", 190}};
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& rec : j) {
    std::string input = rec.value("input", "");
    std::string method = rec.value("method", "");
    auto it = want_gens.find(input);
    if (it == want_gens.end() || (method != "solv" && method != "overlap")) {
      note = "unexpected record for input '" + input + "' method '" + method +
             "'";
      return false;
    }
    if (!seen.insert({input, method}).second) {
      note = "duplicate record";
      return false;
    }
    if (rec.value("gens", -1) != it->second) {
      note = input + ": wrong generator count";
      return false;
    }
    if (rec.value("verdict", "") != std::string("consistent")) {
      note = input + " " + method + ": verdict " + rec.value("verdict", "?");
      return false;
    }
    if (rec.value("steps", 0.0) <= 0) {
      note = input + " " + method + ": no steps recorded";
      return false;
    }
    double ms = rec.value("ms", -1.0);
    if (ms < 0 || ms > kBenchPerInputLimitMs) {
      note = input + " " + method + ": took " + std::to_string(ms) + " ms";
      return false;
    }
    if (rec.value("reps", 0) != 1) {
      note = "wrong rep count";
      return false;
    }
  }
  note = "bench verified ut(12,2), ut(16,2), ut(20,2) under both methods "
         "within the per-input budget";
  return true;
}

// ----- criterion 7: automorphism checks verified by enumeration ---------------

bool criterion7(std::string& note) {
  for (int i = 1; i <= kAutoGroups; ++i) {
    auto p = random_tower(200 + i, 4, true, kAutoOrderCap);
    MuTable mu;
    if (check_solv(p, {}, &mu).verdict != Verdict::consistent) {
      note = "tower " + std::to_string(i) + " not consistent";
      return false;
    }
    auto ctx = whole(p);
    const int m = p.num_generators();
    auto els = models::enumerate_normal_words(p);
    if (els.size() < 2) {
      note = "tower " + std::to_string(i) + " is trivial";
      return false;
    }

    std::mt19937_64 rng(900 + static_cast<std::uint64_t>(i));
    std::vector<Letter> hl;
    for (Gen g = m; g >= 1; --g) {
      long e =
          std::uniform_int_distribution<long>(0, to_long(p.order(g)) - 1)(rng);
      if (e) hl.emplace_back(g, Int(e));
    }
    auto h = NormalWord::from_letters(std::move(hl));

    GeneratorMap inner;
    for (Gen g = 1; g <= m; ++g)
      inner.images.push_back(conjugate(NormalWord::generator(g), h, ctx, mu));
    if (!check_automorphism(p, inner, mu).ok) {
      note = "inner map rejected on tower " + std::to_string(i);
      return false;
    }
    std::set<std::vector<long>> images;
    for (const auto& el : els)
      images.insert(models::dense_exps(apply_map(el, inner, ctx, mu), m));
    if (images.size() != els.size()) {
      note = "accepted map is not a bijection on tower " + std::to_string(i);
      return false;
    }

    GeneratorMap collapse;
    collapse.images.assign(m, NormalWord{});
    auto rep = check_automorphism(p, collapse, mu);
    bool det_failure = false;
    for (const auto& f : rep.failures) det_failure |= f.condition == "det";
    if (rep.ok || !det_failure) {
      note = "collapsing map not rejected on tower " + std::to_string(i);
      return false;
    }
    std::set<std::vector<long>> collapsed;
    for (const auto& el : els)
      collapsed.insert(models::dense_exps(apply_map(el, collapse, ctx, mu), m));
    if (collapsed.size() >= els.size()) {
      note = "collapsing map unexpectedly bijective on tower " +
             std::to_string(i);
      return false;
    }
  }
  note = std::to_string(kAutoGroups) +
         " finite groups: inner maps accepted and verified bijective by "
         "enumeration, collapsing maps rejected with a determinant witness";
  return true;
}

}  // namespace

int main() {
  int failed = 0;
  auto run = [&failed](int number, double limit_ms, auto&& fn) {
    std::string note;
    auto t0 = Clock::now();
    bool ok = false;
    try {
      ok = fn(note);
    } catch (const std::exception& e) {
      note = std::string("unexpected exception: ") + e.what();
      ok = false;
    }
    double ms = ms_since(t0);
    if (ok && ms > limit_ms) {
      ok = false;
      note += " [exceeded the " + std::to_string(static_cast<long>(limit_ms)) +
              " ms budget]";
    }
    std::printf("[%s] criterion %d: %s (%.1f ms)\n", ok ? "PASS" : "FAIL",
                number, note.c_str(), ms);
    std::fflush(stdout);
    if (!ok) ++failed;
  };

  CorpusShared shared;
  run(1, kWitnessLimitMs, [](std::string& n) { return criterion1(n); });
  run(2, kTableLimitMs, [](std::string& n) { return criterion2(n); });
  run(3, kCorpusLimitMs,
      [&shared](std::string& n) { return criterion3(n, shared); });
  run(4, kTruncateLimitMs,
      [&shared](std::string& n) { return criterion4(n, shared); });
  run(5, kInverseLimitMs, [](std::string& n) { return criterion5(n); });
  run(6, kBenchWallLimitMs, [](std::string& n) { return criterion6(n); });
  run(7, kAutoLimitMs, [](std::string& n) { return criterion7(n); });
  return failed;
}
