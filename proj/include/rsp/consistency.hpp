#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rsp/collector.hpp"
#include "rsp/matrix.hpp"
#include "rsp/presentation.hpp"

namespace rsp {

enum class Verdict { consistent, inconsistent, aborted };
enum class Method { solv, overlap };
enum class CheckMode {
  incremental,  // stop at the first generator whose conditions fail
  per_z         // evaluate every generator, still report the smallest
};

const char* to_string(Verdict v);
const char* to_string(Method m);

// One failed condition instance. condition is "1".."5" for the
// determinant-based checker and "a".."e" for the overlap checker; z, x, y
// name the generators involved (0 when not applicable); left/right hold the
// two collected sides where the condition compares words.
struct Failure {
  std::string condition;
  Gen z = 0;
  Gen x = 0;
  Gen y = 0;
  std::string left;
  std::string right;
  std::string detail;

  friend bool operator==(const Failure& a, const Failure& b) {
    return a.condition == b.condition && a.z == b.z && a.x == b.x &&
           a.y == b.y && a.left == b.left && a.right == b.right &&
           a.detail == b.detail;
  }
};

struct ConsistencyReport {
  Method method = Method::solv;
  Verdict verdict = Verdict::consistent;
  std::vector<Failure> failures;
  double elapsed_ms = 0.0;
  std::uint64_t steps = 0;
  std::string diagnostic;  // set when verdict == aborted
};

struct CheckOptions {
  std::uint64_t step_limit = 10'000'000;
  bool parallel = true;  // false forces the serial reference path
  CheckMode mode = CheckMode::incremental;
};

// The conjugation map g -> g^z given by the presentation, read as a map on
// words over x_1..x_(z-1).
struct DeltaMap {
  const RefinedPresentation* p = nullptr;
  Gen z = 0;
};

// Image of w (a word over generators below d.z) under the map, collected in
// ctx. ctx must expose at least the generators below d.z and tbl must cover
// the infinite-order pairs of ctx.
NormalWord apply_delta(const NormalWord& w, const DeltaMap& d,
                       const SubPresentation& ctx, const MuTable& tbl,
                       const CollectOptions& opts = {},
                       CollectStats* stats = nullptr);

// Action of z on one section below it: entry (i, j) is the exponent of the
// i-th section generator in delta(y_j, z).
struct InducedMatrix {
  Section section;
  std::vector<Gen> gens;
  Matrix entries;
};

InducedMatrix induced_matrix(const RefinedPresentation& p, Gen z, Section s);

// Invertibility test for an induced action: determinant +-1 over the
// integers for an infinite section, nonzero mod p for a p-section. value
// holds the determinant (or its residue mod p).
struct DetCheck {
  bool pass = false;
  Int value;
};

DetCheck det_check(const InducedMatrix& m, const RefinedPresentation& p);

// Determinant-based consistency check. Walks z upward, testing the five
// condition families inside the subgroup below z, and extends the inverse
// conjugate table after each infinite-order z that passes. On success
// mu_out (if given) receives the full table, ready for normal form
// computations over the whole presentation.
ConsistencyReport check_solv(const RefinedPresentation& p,
                                 const CheckOptions& opts = {},
                                 MuTable* mu_out = nullptr);

// Critical-pair consistency check: collects both sides of every overlap of
// the rewriting rules and compares.
ConsistencyReport check_overlap(const RefinedPresentation& p,
                                const CheckOptions& opts = {});

struct MethodComparison {
  ConsistencyReport solv;
  ConsistencyReport overlap;
  bool agree = false;  // verdicts equal
};

MethodComparison compare_methods(const RefinedPresentation& p,
                                 const CheckOptions& opts = {});

// A candidate endomorphism given by generator images.
struct GeneratorMap {
  std::vector<NormalWord> images;  // images[g-1] is the image of x_g

  const NormalWord& image(Gen g) const { return images.at(g - 1); }
};

// Image of w under the map, collected in ctx.
NormalWord apply_map(const NormalWord& w, const GeneratorMap& phi,
                     const SubPresentation& ctx, const MuTable& tbl,
                     const CollectOptions& opts = {},
                     CollectStats* stats = nullptr);

// Homomorphism-plus-invertibility test for phi on a consistent
// presentation: the defining relations must be preserved and the induced
// matrix of phi on every section must be invertible in the appropriate
// sense. failures reuse condition ids "pow" (power relations), "cnj"
// (conjugacy relations) and "det".
struct AutomorphismReport {
  bool ok = false;
  std::vector<Failure> failures;
};

AutomorphismReport check_automorphism(const RefinedPresentation& p,
                                      const GeneratorMap& phi,
                                      const MuTable& tbl,
                                      const CheckOptions& opts = {});

// Rendering.
std::string report_to_text(const ConsistencyReport& r,
                           const RefinedPresentation& p);
std::string report_to_json(const ConsistencyReport& r,
                           const RefinedPresentation& p);
std::string comparison_to_json(const MethodComparison& c,
                               const RefinedPresentation& p);

// Section inverses for the generators below z, as consumed by
// derive_inverse_conjugates. Fails (returning the offending check) only on
// a singular induced action.
struct SectionInversesResult {
  bool ok = false;
  std::vector<SectionInverse> inverses;
  Section failed_section;  // valid when !ok
  Int failed_det;
};

SectionInversesResult section_inverses(const RefinedPresentation& p, Gen z);

}  // namespace rsp
