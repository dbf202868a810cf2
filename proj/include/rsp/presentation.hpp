#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsp/bigint.hpp"

namespace rsp {

// Generators are identified by their 1-based position in the ordering
// x_1 < x_2 < ... < x_m. Names are surface syntax only.
using Gen = int;

struct Letter {
  Gen gen = 0;
  Int exp;

  Letter() = default;
  Letter(Gen g, Int e) : gen(g), exp(std::move(e)) {}

  friend bool operator==(const Letter& a, const Letter& b) {
    return a.gen == b.gen && a.exp == b.exp;
  }
  friend bool operator!=(const Letter& a, const Letter& b) { return !(a == b); }
};

// Word in the free group on x_1..x_m: a sequence of letters where adjacent
// letters use distinct generators and every exponent is nonzero. The empty
// word is the identity. push() maintains the invariant by merging.
class FreeWord {
 public:
  FreeWord() = default;
  explicit FreeWord(std::vector<Letter> letters);

  void push(Gen g, Int e);
  void push(const Letter& l) { push(l.gen, l.exp); }

  const std::vector<Letter>& letters() const { return letters_; }
  bool empty() const { return letters_.empty(); }

  friend bool operator==(const FreeWord& a, const FreeWord& b) {
    return a.letters_ == b.letters_;
  }

 private:
  std::vector<Letter> letters_;
};

// Collected word x_k^{r_k} ... x_1^{r_1}: letters strictly descending by
// generator with nonzero exponents. Stored sparse; a generator that does
// not appear has exponent zero. Coefficient-domain membership is checked
// where words meet a presentation, not here.
class NormalWord {
 public:
  NormalWord() = default;
  static NormalWord from_letters(std::vector<Letter> letters);
  static NormalWord generator(Gen g) { return from_letters({Letter(g, 1)}); }

  const std::vector<Letter>& letters() const { return letters_; }
  bool is_identity() const { return letters_.empty(); }
  // Exponent of g in the word (zero if absent).
  Int exp(Gen g) const;
  // Largest generator appearing, 0 for the identity.
  Gen top() const { return letters_.empty() ? 0 : letters_.front().gen; }

  friend bool operator==(const NormalWord& a, const NormalWord& b) {
    return a.letters_ == b.letters_;
  }
  friend bool operator!=(const NormalWord& a, const NormalWord& b) {
    return !(a == b);
  }

 private:
  std::vector<Letter> letters_;
};

// Order and partition data for one generator. order == 0 encodes infinite
// relative order, in which case prime == 0 as well; otherwise order is a
// power of prime.
struct GeneratorInfo {
  std::string name;
  int block = 0;
  long prime = 0;
  Int order;

  bool finite() const { return sgn(order) != 0; }

  friend bool operator==(const GeneratorInfo& a, const GeneratorInfo& b) {
    return a.name == b.name && a.block == b.block && a.prime == b.prime &&
           a.order == b.order;
  }
};

// One section of the refined series: the generators of a block sharing a
// prime (prime == 0 for the infinite-order part of the block).
struct Section {
  int block = 0;
  long prime = 0;

  friend bool operator==(const Section& a, const Section& b) {
    return a.block == b.block && a.prime == b.prime;
  }
};

struct Violation {
  std::string constraint;  // e.g. "block-order", "pi-support", "conj-type2"
  Gen x = 0;
  Gen y = 0;
  std::string message;
};

struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(int line_, int col_, const std::string& what_)
      : std::runtime_error("line " + std::to_string(line_) + ", col " +
                           std::to_string(col_) + ": " + what_),
        line(line_),
        col(col_) {}
};

struct ValidationError : std::runtime_error {
  std::vector<Violation> violations;
  explicit ValidationError(std::vector<Violation> v);
};

// A group presentation on x_1 < ... < x_m given by power relations
// x^n(x) = pi(x) for finite-order x and conjugacy relations x^y = delta(x,y)
// for x < y, with delta stored for every pair (default x^y = x). Immutable
// after construction, so checkers can share one instance across threads.
class RefinedPresentation {
 public:
  RefinedPresentation() = default;
  RefinedPresentation(std::vector<GeneratorInfo> gens,
                      std::vector<NormalWord> power_rhs,
                      std::vector<NormalWord> conj_rhs);

  int num_generators() const { return static_cast<int>(gens_.size()); }
  int num_blocks() const {
    return gens_.empty() ? 0 : gens_.back().block;
  }
  const GeneratorInfo& gen(Gen g) const { return gens_.at(g - 1); }
  bool finite(Gen g) const { return gen(g).finite(); }
  const Int& order(Gen g) const { return gen(g).order; }
  int block_of(Gen g) const { return gen(g).block; }
  long prime_of(Gen g) const { return gen(g).prime; }

  // pi(g); identity when no power relation was given. Only meaningful for
  // finite-order g.
  const NormalWord& power_rhs(Gen g) const { return power_rhs_.at(g - 1); }
  // delta(x, y) for x < y.
  const NormalWord& conj_rhs(Gen x, Gen y) const {
    return conj_rhs_.at(pair_index(x, y));
  }

  // 0 if the name is unknown.
  Gen find(const std::string& name) const;

  static std::size_t pair_index(Gen x, Gen y) {
    return static_cast<std::size_t>(y - 1) * (y - 2) / 2 +
           static_cast<std::size_t>(x - 1);
  }

  friend bool operator==(const RefinedPresentation& a,
                         const RefinedPresentation& b) {
    return a.gens_ == b.gens_ && a.power_rhs_ == b.power_rhs_ &&
           a.conj_rhs_ == b.conj_rhs_;
  }

 private:
  std::vector<GeneratorInfo> gens_;
  std::vector<NormalWord> power_rhs_;  // indexed by g-1
  std::vector<NormalWord> conj_rhs_;   // indexed by pair_index(x, y)
};

// Text format round trip. parse throws ParseError on malformed input and
// ValidationError when the structure violates the presentation constraints.
RefinedPresentation parse(const std::string& text);
std::string serialize(const RefinedPresentation& p);

// All constraint violations of p (empty for a well-formed presentation).
std::vector<Violation> validate(const RefinedPresentation& p);

// The presentation on x_1..x_k obtained by dropping later generators and
// every relation mentioning them. Throws std::out_of_range for bad k.
RefinedPresentation truncate(const RefinedPresentation& p, int k);

// Sections in series order (blocks ascending; inside a block the finite
// primes ascending, then the infinite part), listing only sections that
// contain a generator < below (below == 0 means no bound). Empty sections
// are omitted.
std::vector<Section> sections(const RefinedPresentation& p, Gen below = 0);
std::vector<Gen> section_gens(const RefinedPresentation& p, Section s,
                              Gen below = 0);

// Word syntax: "1" for the identity, otherwise whitespace-separated factors
// name^exp (bare name means exponent 1).
FreeWord parse_free_word(const std::string& text, const RefinedPresentation& p);
std::string format_word(const std::vector<Letter>& letters,
                        const RefinedPresentation& p);
inline std::string format_word(const NormalWord& w,
                               const RefinedPresentation& p) {
  return format_word(w.letters(), p);
}
inline std::string format_word(const FreeWord& w,
                               const RefinedPresentation& p) {
  return format_word(w.letters(), p);
}

}  // namespace rsp
