#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>

#include "rsp/consistency.hpp"
#include "rsp/presentation.hpp"

namespace rsp {

enum class PartitionChoice { new_block, merge_into_top_block };

// Extension by an infinite cyclic group acting through phi.
struct InfiniteCyclicKind {};

// Extension by a cyclic group of prime-power order: the new generator t
// satisfies t^exponent = center and acts through phi, with phi^exponent
// equal to conjugation by center.
struct FiniteCentralKind {
  Int exponent;
  NormalWord center;
};

struct ExtensionSpec {
  RefinedPresentation base;
  GeneratorMap phi;
  std::variant<InfiniteCyclicKind, FiniteCentralKind> kind;
  PartitionChoice partition = PartitionChoice::new_block;
  std::string name;  // name for the new generator; empty picks one
};

class ExtensionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Both builders verify their preconditions (consistent base, phi an
// automorphism, the compatibility conditions of the chosen kind) and the
// structural constraints of the result, throwing ExtensionError with the
// violated condition on failure.
RefinedPresentation extend_infinite(const ExtensionSpec& spec,
                                    const CheckOptions& opts = {});
RefinedPresentation extend_finite_central(const ExtensionSpec& spec,
                                          const CheckOptions& opts = {});

// Standard families. Parameter ranges: cyclic 1 <= n <= 10^12 (with small
// prime factors), dihedral a power of two >= 8, ut 2 <= n <= 30 with prime
// p <= 97, free_abelian 0 <= rank <= 512.
RefinedPresentation family_cyclic(const Int& n);
RefinedPresentation family_dihedral(const Int& order);
RefinedPresentation family_quaternion8();
RefinedPresentation family_heisenberg();
RefinedPresentation family_ut(int n, long p);
RefinedPresentation family_free_abelian(int rank);

// Text form: "cyclic(12)", "dihedral(16)", "quaternion8", "heisenberg",
// "ut(12,2)", "free_abelian(3)". Throws std::invalid_argument on anything
// else.
RefinedPresentation family_from_spec(const std::string& text);

struct MutationResult {
  RefinedPresentation presentation;
  bool changed = false;
  std::string description;
};

// Perturbs one exponent of one power or conjugacy relation, staying inside
// coefficient domains and the per-type support constraints. Deterministic in
// the seed. changed is false when the presentation has no mutable slot.
MutationResult mutate(const RefinedPresentation& p, std::uint64_t seed);

// Builds a presentation by stacking seeded extensions on a small base.
// Every level goes through the verifying builders, so the result is
// consistent by construction. With finite_only the group stays finite with
// order at most order_cap (levels stop early if the cap would be passed).
RefinedPresentation random_tower(std::uint64_t seed, int depth,
                                 bool finite_only = false,
                                 const Int& order_cap = 4096);

}  // namespace rsp
