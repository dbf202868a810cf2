#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rsp/matrix.hpp"
#include "rsp/presentation.hpp"

namespace rsp {

// View of the subgroup generated by x_1..x_k with the induced relations.
// Collection inside the view never touches generators above k.
struct SubPresentation {
  const RefinedPresentation* p = nullptr;
  int k = 0;

  const RefinedPresentation& full() const { return *p; }
};

SubPresentation restrict(const RefinedPresentation& p, int k);
inline SubPresentation whole(const RefinedPresentation& p) {
  return SubPresentation{&p, p.num_generators()};
}

// Table of inverse conjugates mu(x, y) = x^(y^-1), filled in per pair as
// derivation proceeds. Collection consults it when it has to push a letter
// past y^-1 for an infinite-order y; entries for finite-order y are never
// needed because y^-1 rewrites through the power relation.
class MuTable {
 public:
  MuTable() = default;

  bool has(Gen x, Gen y) const {
    auto i = RefinedPresentation::pair_index(x, y);
    return i < entries_.size() && entries_[i].has_value();
  }
  const NormalWord& mu(Gen x, Gen y) const {
    auto i = RefinedPresentation::pair_index(x, y);
    if (i >= entries_.size() || !entries_[i])
      throw std::out_of_range("MuTable: missing entry");
    return *entries_[i];
  }
  void set(Gen x, Gen y, NormalWord w) {
    auto i = RefinedPresentation::pair_index(x, y);
    if (i >= entries_.size()) entries_.resize(i + 1);
    entries_[i] = std::move(w);
  }

 private:
  std::vector<std::optional<NormalWord>> entries_;
};

struct CollectOptions {
  // Rewriting steps allowed per top-level call, shared with nested
  // collections it triggers.
  std::uint64_t step_limit = 10'000'000;
};

struct CollectStats {
  std::uint64_t steps = 0;
};

class CollectError : public std::runtime_error {
 public:
  enum class Kind { step_limit, missing_mu };
  CollectError(Kind kind_, const std::string& what_)
      : std::runtime_error(what_), kind(kind_) {}
  Kind kind;
};

// Collection from the left: repeatedly rewrite at the leftmost violation
// until the word is in normal form. Deterministic; throws CollectError when
// the step budget runs out or a needed mu entry is absent.
NormalWord collect(const FreeWord& w, const SubPresentation& ctx,
                   const MuTable& tbl, const CollectOptions& opts = {},
                   CollectStats* stats = nullptr);

NormalWord multiply(const NormalWord& a, const NormalWord& b,
                    const SubPresentation& ctx, const MuTable& tbl,
                    const CollectOptions& opts = {},
                    CollectStats* stats = nullptr);

NormalWord invert(const NormalWord& a, const SubPresentation& ctx,
                  const MuTable& tbl, const CollectOptions& opts = {},
                  CollectStats* stats = nullptr);

NormalWord power(const NormalWord& a, const Int& e, const SubPresentation& ctx,
                 const MuTable& tbl, const CollectOptions& opts = {},
                 CollectStats* stats = nullptr);

// b^-1 a b.
NormalWord conjugate(const NormalWord& a, const NormalWord& b,
                     const SubPresentation& ctx, const MuTable& tbl,
                     const CollectOptions& opts = {},
                     CollectStats* stats = nullptr);

// Inverse data for one section, produced by the consistency layer: the
// matrix is the inverse of the induced action of z on the section (exact
// integer inverse for an infinite section, inverse mod prime^max-order for
// a finite one).
struct SectionInverse {
  Section section;
  std::vector<Gen> gens;  // ascending
  Matrix inverse;
};

class MuDeriveError : public std::runtime_error {
 public:
  MuDeriveError(Section section_, const std::string& what_)
      : std::runtime_error(what_), section(section_) {}
  Section section;
};

// Extends tbl with mu(x, z) for every x < z. ctx must expose exactly the
// generators below z and tbl must already hold entries for all infinite-order
// pairs inside ctx. Each section inverse is re-checked against the induced
// action before use; a mismatch raises MuDeriveError, which on a validated
// presentation witnesses inconsistency.
MuTable derive_inverse_conjugates(const SubPresentation& ctx, Gen z,
                                  const MuTable& tbl,
                                  const std::vector<SectionInverse>& inverses,
                                  const CollectOptions& opts = {},
                                  CollectStats* stats = nullptr);

}  // namespace rsp
