#include "rsp/corpus.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <utility>

namespace rsp {

namespace {

// Uniform value in 0..n-1 from the engine, by rejection, so results do not
// depend on the platform's distribution implementation.
std::uint64_t uniform(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

Int uniform_int(std::mt19937_64& rng, const Int& n) {
  // Orders in generated presentations are small, so a 64-bit draw is enough.
  if (!fits_long(n) || sgn(n) <= 0)
    throw std::invalid_argument("uniform_int: bad bound");
  return Int(static_cast<long>(uniform(rng, static_cast<std::uint64_t>(to_long(n)))));
}

std::string fresh_name(const RefinedPresentation& p) {
  const int m = p.num_generators();
  std::string base = "x" + std::to_string(m + 1);
  std::string name = base;
  for (int k = 2; p.find(name) != 0; ++k) name = base + "_" + std::to_string(k);
  return name;
}

// Word with the exponent of g replaced by v (letter dropped when v is 0).
NormalWord set_exp(const NormalWord& w, Gen g, const Int& v) {
  std::vector<Letter> ls = w.letters();
  std::size_t i = 0;
  while (i < ls.size() && ls[i].gen > g) ++i;
  if (i < ls.size() && ls[i].gen == g) {
    if (sgn(v) == 0)
      ls.erase(ls.begin() + i);
    else
      ls[i].exp = v;
  } else if (sgn(v) != 0) {
    ls.insert(ls.begin() + i, Letter(g, v));
  }
  return NormalWord::from_letters(std::move(ls));
}

struct PrimePower {
  long prime = 0;
  bool ok = false;
};

PrimePower prime_power_of(const Int& n) {
  PrimePower out;
  if (n < 2 || !fits_long(n)) return out;
  long v = to_long(n);
  long q = 2;
  while (q * q <= v && v % q != 0) ++q;
  if (v % q != 0) q = v;
  while (v % q == 0) v /= q;
  out.ok = v == 1;
  out.prime = q;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Extension builders.

namespace {

RefinedPresentation build_extension(const ExtensionSpec& spec,
                                    bool infinite_kind,
                                    const CheckOptions& opts) {
  const RefinedPresentation& base = spec.base;
  const int m = base.num_generators();
  if (static_cast<int>(spec.phi.images.size()) != m)
    throw ExtensionError("generator map must give one image per generator");

  MuTable mu;
  ConsistencyReport rep = check_solv(base, opts, &mu);
  if (rep.verdict != Verdict::consistent)
    throw ExtensionError("base presentation is not consistent");

  AutomorphismReport aut = check_automorphism(base, spec.phi, mu, opts);
  if (!aut.ok)
    throw ExtensionError("generator map is not an automorphism (" +
                         std::to_string(aut.failures.size()) +
                         " failed condition(s), first: " +
                         aut.failures.front().condition + ")");

  GeneratorInfo info;
  info.name = spec.name.empty() ? fresh_name(base) : spec.name;
  if (base.find(info.name) != 0)
    throw ExtensionError("generator name '" + info.name + "' already in use");
  if (spec.partition == PartitionChoice::merge_into_top_block) {
    if (m == 0) throw ExtensionError("no block to merge into");
    info.block = base.num_blocks();
  } else {
    info.block = base.num_blocks() + 1;
  }

  NormalWord pi_new;
  if (infinite_kind) {
    if (!std::holds_alternative<InfiniteCyclicKind>(spec.kind))
      throw ExtensionError("extension kind mismatch");
  } else {
    const auto& k = std::get<FiniteCentralKind>(spec.kind);
    PrimePower pp = prime_power_of(k.exponent);
    if (!pp.ok)
      throw ExtensionError("exponent " + to_string(k.exponent) +
                           " is not a prime power >= 2");
    info.prime = pp.prime;
    info.order = k.exponent;
    pi_new = k.center;

    const SubPresentation ctx = whole(base);
    const CollectOptions copts{opts.step_limit};
    // center must be a word of the base group and fixed by phi.
    for (const auto& l : k.center.letters())
      if (l.gen < 1 || l.gen > m)
        throw ExtensionError("center word leaves the base group");
    if (apply_map(k.center, spec.phi, ctx, mu, copts) != k.center)
      throw ExtensionError("center word is not fixed by the generator map");
    // phi^exponent must equal conjugation by the center.
    std::vector<NormalWord> iter = spec.phi.images;
    for (Int i = 1; i < k.exponent; ++i)
      for (int g = 0; g < m; ++g)
        iter[g] = apply_map(iter[g], spec.phi, ctx, mu, copts);
    for (Gen g = 1; g <= m; ++g) {
      NormalWord want =
          conjugate(NormalWord::generator(g), k.center, ctx, mu, copts);
      if (iter[g - 1] != want)
        throw ExtensionError(
            "map iterated " + to_string(k.exponent) +
            " times differs from conjugation by the center at '" +
            base.gen(g).name + "'");
    }
  }

  std::vector<GeneratorInfo> gens;
  std::vector<NormalWord> pow;
  std::vector<NormalWord> cnj;
  gens.reserve(m + 1);
  for (Gen g = 1; g <= m; ++g) gens.push_back(base.gen(g));
  gens.push_back(info);
  for (Gen g = 1; g <= m; ++g) pow.push_back(base.power_rhs(g));
  pow.push_back(pi_new);
  for (Gen y = 2; y <= m; ++y)
    for (Gen x = 1; x < y; ++x) cnj.push_back(base.conj_rhs(x, y));
  for (Gen x = 1; x <= m; ++x) cnj.push_back(spec.phi.image(x));

  RefinedPresentation out(std::move(gens), std::move(pow), std::move(cnj));
  std::vector<Violation> v = validate(out);
  if (!v.empty())
    throw ExtensionError("extension violates structural constraints: " +
                         v.front().message);
  return out;
}

}  // namespace

RefinedPresentation extend_infinite(const ExtensionSpec& spec,
                                    const CheckOptions& opts) {
  if (!std::holds_alternative<InfiniteCyclicKind>(spec.kind))
    throw ExtensionError("extend_infinite called with a finite kind");
  return build_extension(spec, true, opts);
}

RefinedPresentation extend_finite_central(const ExtensionSpec& spec,
                                          const CheckOptions& opts) {
  if (!std::holds_alternative<FiniteCentralKind>(spec.kind))
    throw ExtensionError("extend_finite_central called with an infinite kind");
  return build_extension(spec, false, opts);
}

// ---------------------------------------------------------------------------
// Families.

RefinedPresentation family_cyclic(const Int& n) {
  if (n < 1 || n > Int("1000000000000"))
    throw std::invalid_argument("cyclic: need 1 <= n <= 10^12");
  // One generator per prime-power factor, all in block 1, commuting.
  std::map<long, Int> factors;
  Int v = n;
  for (long q = 2; Int(q) * q <= v; ++q)
    while (v % q == 0) {
      auto [it, fresh] = factors.emplace(q, 1);
      it->second *= q;
      if (fresh) it->second = q;
      v /= q;
    }
  if (v > 1) {
    if (!fits_long(v)) throw std::invalid_argument("cyclic: factor too large");
    factors.emplace(to_long(v), v);
  }
  std::vector<GeneratorInfo> gens;
  int i = 0;
  for (const auto& [q, qe] : factors) {
    GeneratorInfo g;
    g.name = "x" + std::to_string(++i);
    g.block = 1;
    g.prime = q;
    g.order = qe;
    gens.push_back(std::move(g));
  }
  const int m = static_cast<int>(gens.size());
  std::vector<NormalWord> pow(m);
  std::vector<NormalWord> cnj;
  for (Gen y = 2; y <= m; ++y)
    for (Gen x = 1; x < y; ++x) cnj.push_back(NormalWord::generator(x));
  return RefinedPresentation(std::move(gens), std::move(pow), std::move(cnj));
}

RefinedPresentation family_dihedral(const Int& order) {
  Int rot = order / 2;
  if (order < 8 || 2 * rot != order || prime_power_of(order).prime != 2 ||
      !prime_power_of(order).ok)
    throw std::invalid_argument("dihedral: order must be a power of two >= 8");
  std::vector<GeneratorInfo> gens(2);
  gens[0] = {"x1", 1, 2, rot};
  gens[1] = {"x2", 2, 2, 2};
  std::vector<NormalWord> pow(2);
  std::vector<NormalWord> cnj{
      NormalWord::from_letters({Letter(1, rot - 1)})};
  return RefinedPresentation(std::move(gens), std::move(pow), std::move(cnj));
}

RefinedPresentation family_quaternion8() {
  std::vector<GeneratorInfo> gens(2);
  gens[0] = {"x1", 1, 2, 4};
  gens[1] = {"x2", 2, 2, 2};
  std::vector<NormalWord> pow(2);
  pow[1] = NormalWord::from_letters({Letter(1, 2)});
  std::vector<NormalWord> cnj{NormalWord::from_letters({Letter(1, 3)})};
  return RefinedPresentation(std::move(gens), std::move(pow), std::move(cnj));
}

RefinedPresentation family_heisenberg() {
  std::vector<GeneratorInfo> gens(3);
  gens[0] = {"x1", 1, 0, 0};
  gens[1] = {"x2", 2, 0, 0};
  gens[2] = {"x3", 2, 0, 0};
  std::vector<NormalWord> pow(3);
  std::vector<NormalWord> cnj(3);
  cnj[RefinedPresentation::pair_index(1, 2)] = NormalWord::generator(1);
  cnj[RefinedPresentation::pair_index(1, 3)] = NormalWord::generator(1);
  cnj[RefinedPresentation::pair_index(2, 3)] =
      NormalWord::from_letters({Letter(2, 1), Letter(1, 1)});
  return RefinedPresentation(std::move(gens), std::move(pow), std::move(cnj));
}

RefinedPresentation family_ut(int n, long p) {
  if (n < 2 || n > 30) throw std::invalid_argument("ut: need 2 <= n <= 30");
  bool prime = p >= 2;
  for (long d = 2; d * d <= p; ++d)
    if (p % d == 0) prime = false;
  if (!prime || p > 97)
    throw std::invalid_argument("ut: need a prime p <= 97");

  // Generator for the elementary matrix with a one at (i, j). Block s holds
  // the superdiagonal at distance n - s, so earlier blocks sit deeper in the
  // lower central series.
  auto index = [n](int i, int j) {
    int s = n - (j - i);
    return s * (s - 1) / 2 + i;  // 1-based
  };
  const int m = n * (n - 1) / 2;
  std::vector<GeneratorInfo> gens(m);
  for (int d = n - 1; d >= 1; --d)
    for (int i = 1; i + d <= n; ++i) {
      GeneratorInfo& g = gens[index(i, i + d) - 1];
      g.name = "e" + std::to_string(i) + "_" + std::to_string(i + d);
      g.block = n - d;
      g.prime = p;
      g.order = p;
    }
  std::vector<NormalWord> pow(m);
  std::vector<NormalWord> cnj(static_cast<std::size_t>(m) * (m - 1) / 2);
  for (int d2 = n - 1; d2 >= 1; --d2)
    for (int k = 1; k + d2 <= n; ++k)
      for (int d1 = n - 1; d1 >= 1; --d1)
        for (int i = 1; i + d1 <= n; ++i) {
          const int j = i + d1;
          const int l = k + d2;
          const Gen gx = index(i, j);
          const Gen gy = index(k, l);
          if (gx >= gy) continue;
          NormalWord w;
          if (j == k)
            w = NormalWord::from_letters(
                {Letter(gx, 1), Letter(index(i, l), 1)});
          else if (l == i)
            w = NormalWord::from_letters(
                {Letter(gx, 1), Letter(index(k, j), p - 1)});
          else
            w = NormalWord::generator(gx);
          cnj[RefinedPresentation::pair_index(gx, gy)] = std::move(w);
        }
  return RefinedPresentation(std::move(gens), std::move(pow), std::move(cnj));
}

RefinedPresentation family_free_abelian(int rank) {
  if (rank < 0 || rank > 512)
    throw std::invalid_argument("free_abelian: need 0 <= rank <= 512");
  std::vector<GeneratorInfo> gens(rank);
  for (int i = 0; i < rank; ++i)
    gens[i] = {"x" + std::to_string(i + 1), 1, 0, 0};
  std::vector<NormalWord> pow(rank);
  std::vector<NormalWord> cnj;
  for (Gen y = 2; y <= rank; ++y)
    for (Gen x = 1; x < y; ++x) cnj.push_back(NormalWord::generator(x));
  return RefinedPresentation(std::move(gens), std::move(pow), std::move(cnj));
}

RefinedPresentation family_from_spec(const std::string& text) {
  std::string name = text;
  std::vector<Int> args;
  if (auto open = text.find('('); open != std::string::npos) {
    if (text.back() != ')')
      throw std::invalid_argument("family: missing ')' in '" + text + "'");
    name = text.substr(0, open);
    std::string inner = text.substr(open + 1, text.size() - open - 2);
    std::string cur;
    for (char c : inner + ",") {
      if (c == ',') {
        if (cur.empty())
          throw std::invalid_argument("family: empty argument in '" + text + "'");
        args.push_back(Int(cur));
        cur.clear();
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        cur += c;
      } else if (!std::isspace(static_cast<unsigned char>(c))) {
        throw std::invalid_argument("family: bad character in '" + text + "'");
      }
    }
  }
  auto want = [&](std::size_t k) {
    if (args.size() != k)
      throw std::invalid_argument("family '" + name + "' takes " +
                                  std::to_string(k) + " argument(s)");
  };
  if (name == "cyclic") {
    want(1);
    return family_cyclic(args[0]);
  }
  if (name == "dihedral") {
    want(1);
    return family_dihedral(args[0]);
  }
  if (name == "quaternion8") {
    want(0);
    return family_quaternion8();
  }
  if (name == "heisenberg") {
    want(0);
    return family_heisenberg();
  }
  if (name == "ut") {
    want(2);
    if (!fits_long(args[0]) || !fits_long(args[1]))
      throw std::invalid_argument("ut: arguments out of range");
    return family_ut(static_cast<int>(to_long(args[0])), to_long(args[1]));
  }
  if (name == "free_abelian") {
    want(1);
    if (!fits_long(args[0]))
      throw std::invalid_argument("free_abelian: argument out of range");
    return family_free_abelian(static_cast<int>(to_long(args[0])));
  }
  throw std::invalid_argument(
      "unknown family '" + name +
      "' (known: cyclic, dihedral, quaternion8, heisenberg, ut, free_abelian)");
}

// ---------------------------------------------------------------------------
// Mutation.

MutationResult mutate(const RefinedPresentation& p, std::uint64_t seed) {
  const int m = p.num_generators();
  struct Slot {
    bool power = false;
    Gen x = 0;
    Gen y = 0;  // 0 for power slots
    Gen g = 0;  // whose exponent moves
  };
  std::vector<Slot> slots;
  for (Gen x = 1; x <= m; ++x) {
    if (!p.finite(x)) continue;
    for (Gen g = 1; g <= m; ++g)
      if (p.block_of(g) < p.block_of(x)) slots.push_back({true, x, 0, g});
  }
  for (Gen y = 2; y <= m; ++y)
    for (Gen x = 1; x < y; ++x) {
      const int s = p.block_of(x);
      for (Gen g = 1; g <= m; ++g) {
        bool ok;
        if (s == p.block_of(y))
          ok = p.block_of(g) < s;  // the exponent of x itself is pinned to 1
        else if (p.finite(x))
          ok = p.block_of(g) < s ||
               (p.block_of(g) == s && p.finite(g) &&
                p.prime_of(g) == p.prime_of(x));
        else
          ok = p.block_of(g) <= s;
        if (ok) slots.push_back({false, x, y, g});
      }
    }

  MutationResult out;
  if (slots.empty()) {
    out.presentation = p;
    out.changed = false;
    out.description = "no mutable exponent slot";
    return out;
  }

  std::mt19937_64 rng(seed);
  const Slot& sl = slots[uniform(rng, slots.size())];
  const NormalWord& w = sl.power ? p.power_rhs(sl.x) : p.conj_rhs(sl.x, sl.y);
  const Int cur = w.exp(sl.g);
  Int next;
  if (p.finite(sl.g)) {
    Int v = uniform_int(rng, p.order(sl.g) - 1);
    next = v >= cur ? Int(v + 1) : v;
  } else {
    static const int deltas[6] = {-3, -2, -1, 1, 2, 3};
    next = cur + deltas[uniform(rng, 6)];
  }

  std::vector<GeneratorInfo> gens;
  std::vector<NormalWord> pow;
  std::vector<NormalWord> cnj;
  for (Gen g = 1; g <= m; ++g) {
    gens.push_back(p.gen(g));
    pow.push_back(p.power_rhs(g));
  }
  for (Gen y = 2; y <= m; ++y)
    for (Gen x = 1; x < y; ++x) cnj.push_back(p.conj_rhs(x, y));
  NormalWord repl = set_exp(w, sl.g, next);
  if (sl.power)
    pow[sl.x - 1] = repl;
  else
    cnj[RefinedPresentation::pair_index(sl.x, sl.y)] = repl;

  out.presentation =
      RefinedPresentation(std::move(gens), std::move(pow), std::move(cnj));
  out.changed = true;
  out.description =
      (sl.power ? "pow " + p.gen(sl.x).name
                : "cnj " + p.gen(sl.x).name + " " + p.gen(sl.y).name) +
      ": exponent of " + p.gen(sl.g).name + " set to " + to_string(next) +
      " (was " + to_string(cur) + ")";
  return out;
}

// ---------------------------------------------------------------------------
// Random towers.

RefinedPresentation random_tower(std::uint64_t seed, int depth,
                                 bool finite_only, const Int& order_cap) {
  if (depth < 0 || depth > 64)
    throw std::invalid_argument("random_tower: need 0 <= depth <= 64");
  std::mt19937_64 rng(seed);

  RefinedPresentation cur;
  Int order = 1;
  if (finite_only) {
    static const long bases[6] = {2, 3, 4, 5, 8, 9};
    long b = bases[uniform(rng, 6)];
    cur = family_cyclic(b);
    order = b;
  } else {
    switch (uniform(rng, 4)) {
      case 0: cur = family_cyclic(1); break;
      case 1: cur = family_cyclic(4); break;
      case 2: cur = family_cyclic(3); break;
      default: cur = family_free_abelian(1); break;
    }
  }

  const CheckOptions opts;
  for (int level = 0; level < depth; ++level) {
    MuTable mu;
    ConsistencyReport rep = check_solv(cur, opts, &mu);
    if (rep.verdict != Verdict::consistent)
      throw std::logic_error("random_tower: intermediate level inconsistent");
    const SubPresentation ctx = whole(cur);
    const int m = cur.num_generators();

    // A random inner automorphism; identity when every exponent lands on 0.
    std::vector<Letter> hl;
    for (Gen g = m; g >= 1; --g) {
      Int e = cur.finite(g) ? uniform_int(rng, cur.order(g))
                            : Int(static_cast<long>(uniform(rng, 5)) - 2);
      if (sgn(e) != 0) hl.emplace_back(g, std::move(e));
    }
    NormalWord h = NormalWord::from_letters(std::move(hl));
    GeneratorMap phi;
    for (Gen g = 1; g <= m; ++g)
      phi.images.push_back(conjugate(NormalWord::generator(g), h, ctx, mu, {}));

    ExtensionSpec spec;
    spec.base = cur;
    spec.phi = phi;
    bool finite_level = finite_only || uniform(rng, 2) == 0;
    if (finite_level) {
      static const long exps[6] = {2, 3, 4, 5, 8, 9};
      long e = exps[uniform(rng, 6)];
      if (finite_only) {
        // Keep the order under the cap; take the smallest exponent that fits.
        static const long sorted[6] = {2, 3, 4, 5, 8, 9};
        long pick = 0;
        for (long c : sorted)
          if (order * c <= order_cap) {
            pick = c;
            break;
          }
        if (pick == 0) break;
        e = pick;
      }
      spec.kind = FiniteCentralKind{Int(e), power(h, Int(e), ctx, mu, {})};
      order *= e;
    } else {
      spec.kind = InfiniteCyclicKind{};
    }
    spec.partition = uniform(rng, 4) == 0 ? PartitionChoice::merge_into_top_block
                                          : PartitionChoice::new_block;

    auto build = [&](const ExtensionSpec& s) {
      return finite_level ? extend_finite_central(s, opts)
                          : extend_infinite(s, opts);
    };
    try {
      cur = build(spec);
      continue;
    } catch (const ExtensionError&) {
    }
    spec.partition = PartitionChoice::new_block;
    try {
      cur = build(spec);
      continue;
    } catch (const ExtensionError&) {
    }
    // Fall back to a direct product level, which always satisfies the
    // builder's conditions.
    for (Gen g = 1; g <= m; ++g) phi.images[g - 1] = NormalWord::generator(g);
    spec.phi = phi;
    if (finite_level) {
      auto& k = std::get<FiniteCentralKind>(spec.kind);
      k.center = NormalWord();
    }
    cur = build(spec);
  }
  return cur;
}

}  // namespace rsp
