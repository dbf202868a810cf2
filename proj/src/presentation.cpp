#include "rsp/presentation.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <utility>

namespace rsp {

namespace {

bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// order must be prime^k, k >= 1.
bool is_power_of(const Int& order, long prime) {
  if (order < 2) return false;
  Int v = order;
  while (v % prime == 0) v /= prime;
  return v == 1;
}

}  // namespace

FreeWord::FreeWord(std::vector<Letter> letters) {
  for (auto& l : letters) push(l.gen, std::move(l.exp));
}

void FreeWord::push(Gen g, Int e) {
  if (g <= 0) throw std::invalid_argument("FreeWord: generator index must be positive");
  if (sgn(e) == 0) return;
  if (!letters_.empty() && letters_.back().gen == g) {
    letters_.back().exp += e;
    if (sgn(letters_.back().exp) == 0) letters_.pop_back();
    return;
  }
  letters_.emplace_back(g, std::move(e));
}

NormalWord NormalWord::from_letters(std::vector<Letter> letters) {
  for (std::size_t i = 0; i < letters.size(); ++i) {
    if (letters[i].gen <= 0)
      throw std::invalid_argument("NormalWord: generator index must be positive");
    if (sgn(letters[i].exp) == 0)
      throw std::invalid_argument("NormalWord: zero exponent");
    if (i > 0 && letters[i - 1].gen <= letters[i].gen)
      throw std::invalid_argument("NormalWord: letters must be strictly descending");
  }
  NormalWord w;
  w.letters_ = std::move(letters);
  return w;
}

Int NormalWord::exp(Gen g) const {
  for (const auto& l : letters_) {
    if (l.gen == g) return l.exp;
    if (l.gen < g) break;
  }
  return 0;
}

ValidationError::ValidationError(std::vector<Violation> v)
    : std::runtime_error([&v] {
        std::string s = "presentation has " + std::to_string(v.size()) +
                        " constraint violation(s)";
        if (!v.empty()) s += ": " + v.front().message;
        return s;
      }()),
      violations(std::move(v)) {}

RefinedPresentation::RefinedPresentation(std::vector<GeneratorInfo> gens,
                                         std::vector<NormalWord> power_rhs,
                                         std::vector<NormalWord> conj_rhs)
    : gens_(std::move(gens)),
      power_rhs_(std::move(power_rhs)),
      conj_rhs_(std::move(conj_rhs)) {
  const std::size_t m = gens_.size();
  if (power_rhs_.size() != m || conj_rhs_.size() != m * (m ? m - 1 : 0) / 2)
    throw std::invalid_argument("RefinedPresentation: relation table size mismatch");
}

Gen RefinedPresentation::find(const std::string& name) const {
  for (std::size_t i = 0; i < gens_.size(); ++i)
    if (gens_[i].name == name) return static_cast<Gen>(i + 1);
  return 0;
}

std::vector<Violation> validate(const RefinedPresentation& p) {
  std::vector<Violation> out;
  const int m = p.num_generators();

  auto bad = [&out](std::string constraint, Gen x, Gen y, std::string msg) {
    out.push_back({std::move(constraint), x, y, std::move(msg)});
  };

  // Generator data: names, block numbering, order/prime agreement.
  std::map<std::string, Gen> seen;
  for (Gen g = 1; g <= m; ++g) {
    const auto& info = p.gen(g);
    if (info.name.empty())
      bad("gen-name", g, 0, "generator " + std::to_string(g) + " has no name");
    auto [it, fresh] = seen.emplace(info.name, g);
    if (!fresh)
      bad("gen-name", g, it->second,
          "duplicate generator name '" + info.name + "'");
    int prev_block = g == 1 ? 0 : p.block_of(g - 1);
    if (info.block != prev_block && info.block != prev_block + 1)
      bad("block-order", g, 0,
          "generator '" + info.name + "' has block " +
              std::to_string(info.block) + " after block " +
              std::to_string(prev_block));
    if (info.finite()) {
      if (!is_prime(info.prime))
        bad("gen-order", g, 0,
            "generator '" + info.name + "': " + std::to_string(info.prime) +
                " is not prime");
      else if (!is_power_of(info.order, info.prime))
        bad("gen-order", g, 0,
            "generator '" + info.name + "': order " + to_string(info.order) +
                " is not a power of " + std::to_string(info.prime));
    } else if (info.prime != 0) {
      bad("gen-order", g, 0,
          "generator '" + info.name + "' is infinite but carries a prime");
    }
  }

  // A letter (g, e) inside a relation right-hand side must keep e inside the
  // coefficient domain of g.
  auto check_domain = [&](const NormalWord& w, const char* what, Gen x, Gen y) {
    for (const auto& l : w.letters()) {
      if (l.gen > m) {
        bad("word-range", x, y,
            std::string(what) + ": letter uses generator index " +
                std::to_string(l.gen) + " beyond the alphabet");
        continue;
      }
      if (p.finite(l.gen) && (sgn(l.exp) < 0 || l.exp >= p.order(l.gen)))
        bad("word-domain", x, y,
            std::string(what) + ": exponent " + to_string(l.exp) + " of '" +
                p.gen(l.gen).name + "' is outside 0.." +
                to_string(Int(p.order(l.gen) - 1)));
    }
  };

  for (Gen g = 1; g <= m; ++g) {
    const NormalWord& pi = p.power_rhs(g);
    if (!p.finite(g)) {
      if (!pi.is_identity())
        bad("pi-domain", g, 0,
            "power relation on infinite-order generator '" + p.gen(g).name + "'");
      continue;
    }
    check_domain(pi, "power relation", g, 0);
    for (const auto& l : pi.letters())
      if (l.gen <= m && p.block_of(l.gen) >= p.block_of(g))
        bad("pi-support", g, 0,
            "power relation of '" + p.gen(g).name + "' mentions '" +
                p.gen(l.gen).name + "' from block " +
                std::to_string(p.block_of(l.gen)));
  }

  for (Gen y = 2; y <= m; ++y) {
    for (Gen x = 1; x < y; ++x) {
      const NormalWord& d = p.conj_rhs(x, y);
      std::string what = "conjugacy relation of ('" + p.gen(x).name + "', '" +
                         p.gen(y).name + "')";
      check_domain(d, what.c_str(), x, y);
      const int s = p.block_of(x);
      if (s == p.block_of(y)) {
        // Same block: the image is x times a tail from lower blocks.
        if (d.exp(x) != 1)
          bad("conj-type1", x, y,
              what + ": exponent of '" + p.gen(x).name + "' must be 1");
        for (const auto& l : d.letters())
          if (l.gen <= m && l.gen != x && p.block_of(l.gen) >= s)
            bad("conj-type1", x, y,
                what + ": support reaches '" + p.gen(l.gen).name +
                    "' in block " + std::to_string(p.block_of(l.gen)));
      } else if (p.finite(x)) {
        // Lower finite generator: support in lower blocks plus the prime part
        // of x's own block.
        for (const auto& l : d.letters()) {
          if (l.gen > m) continue;
          bool ok = p.block_of(l.gen) < s ||
                    (p.block_of(l.gen) == s && p.prime_of(l.gen) == p.prime_of(x));
          if (!ok)
            bad("conj-type2", x, y,
                what + ": support reaches '" + p.gen(l.gen).name + "'");
        }
      } else {
        // Lower infinite generator: support in blocks up to x's own.
        for (const auto& l : d.letters())
          if (l.gen <= m && p.block_of(l.gen) > s)
            bad("conj-type3", x, y,
                what + ": support reaches '" + p.gen(l.gen).name +
                    "' in block " + std::to_string(p.block_of(l.gen)));
      }
    }
  }
  return out;
}

RefinedPresentation truncate(const RefinedPresentation& p, int k) {
  if (k < 0 || k > p.num_generators())
    throw std::out_of_range("truncate: k out of range");
  std::vector<GeneratorInfo> gens;
  std::vector<NormalWord> pow;
  std::vector<NormalWord> cnj;
  gens.reserve(k);
  pow.reserve(k);
  for (Gen g = 1; g <= k; ++g) {
    gens.push_back(p.gen(g));
    pow.push_back(p.power_rhs(g));
  }
  for (Gen y = 2; y <= k; ++y)
    for (Gen x = 1; x < y; ++x) cnj.push_back(p.conj_rhs(x, y));
  return RefinedPresentation(std::move(gens), std::move(pow), std::move(cnj));
}

std::vector<Section> sections(const RefinedPresentation& p, Gen below) {
  const int m = below > 0 ? below - 1 : p.num_generators();
  std::vector<Section> out;
  int block = 0;
  std::vector<long> primes;
  bool has_inf = false;
  auto flush = [&] {
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
    for (long q : primes) out.push_back({block, q});
    if (has_inf) out.push_back({block, 0});
    primes.clear();
    has_inf = false;
  };
  for (Gen g = 1; g <= m; ++g) {
    if (p.block_of(g) != block) {
      flush();
      block = p.block_of(g);
    }
    if (p.finite(g))
      primes.push_back(p.prime_of(g));
    else
      has_inf = true;
  }
  flush();
  return out;
}

std::vector<Gen> section_gens(const RefinedPresentation& p, Section s,
                              Gen below) {
  const int m = below > 0 ? below - 1 : p.num_generators();
  std::vector<Gen> out;
  for (Gen g = 1; g <= m; ++g)
    if (p.block_of(g) == s.block && p.prime_of(g) == s.prime &&
        p.finite(g) == (s.prime != 0))
      out.push_back(g);
  return out;
}

// ---------------------------------------------------------------------------
// Text format.

namespace {

struct Token {
  std::string text;
  int col = 0;  // 1-based start column
};

std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    if (line[i] == '#') break;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) &&
           line[j] != '#')
      ++j;
    toks.push_back({line.substr(i, j - i), static_cast<int>(i + 1)});
    i = j;
  }
  return toks;
}

bool parse_int(const std::string& s, Int& out) {
  if (s.empty()) return false;
  std::size_t start = s[0] == '-' ? 1 : 0;
  if (start == s.size()) return false;
  for (std::size_t i = start; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  out = Int(s);
  return true;
}

struct WordParser {
  const std::map<std::string, Gen>& names;
  int line;

  // Parses factors name^exp (bare name = exponent 1); "1" alone is identity.
  std::vector<Letter> run(const std::vector<Token>& toks, std::size_t from,
                          std::size_t to) const {
    if (from >= to) throw ParseError(line, 1, "expected a word");
    if (to - from == 1 && toks[from].text == "1") return {};
    std::vector<Letter> letters;
    for (std::size_t i = from; i < to; ++i) {
      const Token& t = toks[i];
      std::string name = t.text;
      Int e = 1;
      if (auto caret = t.text.find('^'); caret != std::string::npos) {
        name = t.text.substr(0, caret);
        if (!parse_int(t.text.substr(caret + 1), e))
          throw ParseError(line, t.col, "bad exponent in '" + t.text + "'");
      }
      auto it = names.find(name);
      if (it == names.end())
        throw ParseError(line, t.col, "unknown generator '" + name + "'");
      if (sgn(e) == 0)
        throw ParseError(line, t.col, "zero exponent in '" + t.text + "'");
      letters.emplace_back(it->second, std::move(e));
    }
    return letters;
  }
};

}  // namespace

RefinedPresentation parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;

  std::vector<GeneratorInfo> gens;
  std::map<std::string, Gen> names;
  std::vector<std::pair<Gen, std::vector<Letter>>> pow_lines;
  std::vector<std::pair<std::pair<Gen, Gen>, std::vector<Letter>>> cnj_lines;
  bool header_seen = false;

  while (std::getline(in, line)) {
    ++lineno;
    auto toks = tokenize(line);
    if (toks.empty()) continue;

    if (!header_seen) {
      if (toks.size() != 2 || toks[0].text != "rsp" || toks[1].text != "1")
        throw ParseError(lineno, toks[0].col, "expected header 'rsp 1'");
      header_seen = true;
      continue;
    }

    const std::string& kw = toks[0].text;
    if (kw == "gen") {
      // gen NAME block S order (N|inf) [prime P]
      if (toks.size() != 6 && toks.size() != 8)
        throw ParseError(lineno, toks[0].col,
                         "expected: gen NAME block S order N|inf [prime P]");
      if (toks[2].text != "block")
        throw ParseError(lineno, toks[2].col, "expected 'block'");
      if (toks[4].text != "order")
        throw ParseError(lineno, toks[4].col, "expected 'order'");
      GeneratorInfo info;
      info.name = toks[1].text;
      if (info.name == "1" || info.name.find('^') != std::string::npos)
        throw ParseError(lineno, toks[1].col,
                         "generator name '" + info.name + "' is reserved syntax");
      Int blk;
      if (!parse_int(toks[3].text, blk) || blk < 1 || !fits_long(blk))
        throw ParseError(lineno, toks[3].col, "bad block number");
      info.block = static_cast<int>(to_long(blk));
      if (toks[5].text == "inf") {
        if (toks.size() != 6)
          throw ParseError(lineno, toks[6].col,
                           "infinite-order generator takes no prime");
      } else {
        if (!parse_int(toks[5].text, info.order) || info.order < 2)
          throw ParseError(lineno, toks[5].col, "bad order (need >= 2 or inf)");
        if (toks.size() != 8 || toks[6].text != "prime")
          throw ParseError(lineno, toks[5].col,
                           "finite-order generator needs 'prime P'");
        Int pr;
        if (!parse_int(toks[7].text, pr) || pr < 2 || !fits_long(pr))
          throw ParseError(lineno, toks[7].col, "bad prime");
        info.prime = to_long(pr);
      }
      if (names.count(info.name))
        throw ParseError(lineno, toks[1].col,
                         "duplicate generator '" + info.name + "'");
      gens.push_back(info);
      names[info.name] = static_cast<Gen>(gens.size());
    } else if (kw == "pow") {
      // pow NAME = WORD
      if (toks.size() < 4 || toks[2].text != "=")
        throw ParseError(lineno, toks[0].col, "expected: pow NAME = WORD");
      auto it = names.find(toks[1].text);
      if (it == names.end())
        throw ParseError(lineno, toks[1].col,
                         "unknown generator '" + toks[1].text + "'");
      pow_lines.emplace_back(it->second,
                             WordParser{names, lineno}.run(toks, 3, toks.size()));
    } else if (kw == "cnj") {
      // cnj X Y = WORD  (X below Y in the generator order)
      if (toks.size() < 5 || toks[3].text != "=")
        throw ParseError(lineno, toks[0].col, "expected: cnj X Y = WORD");
      auto ix = names.find(toks[1].text);
      auto iy = names.find(toks[2].text);
      if (ix == names.end())
        throw ParseError(lineno, toks[1].col,
                         "unknown generator '" + toks[1].text + "'");
      if (iy == names.end())
        throw ParseError(lineno, toks[2].col,
                         "unknown generator '" + toks[2].text + "'");
      if (ix->second >= iy->second)
        throw ParseError(lineno, toks[1].col,
                         "cnj takes the lower generator first");
      cnj_lines.emplace_back(std::make_pair(ix->second, iy->second),
                             WordParser{names, lineno}.run(toks, 4, toks.size()));
    } else {
      throw ParseError(lineno, toks[0].col, "unknown keyword '" + kw + "'");
    }
  }
  if (!header_seen) throw ParseError(lineno ? lineno : 1, 1, "missing header 'rsp 1'");

  const int m = static_cast<int>(gens.size());
  std::vector<NormalWord> pow(m);
  std::vector<NormalWord> cnj(static_cast<std::size_t>(m) * (m ? m - 1 : 0) / 2);
  for (Gen y = 2; y <= m; ++y)
    for (Gen x = 1; x < y; ++x)
      cnj[RefinedPresentation::pair_index(x, y)] = NormalWord::generator(x);

  std::vector<bool> pow_set(m, false);
  for (auto& [g, letters] : pow_lines) {
    if (pow_set[g - 1])
      throw ParseError(0, 0,
                       "duplicate power relation for '" + gens[g - 1].name + "'");
    pow_set[g - 1] = true;
    pow[g - 1] = NormalWord::from_letters(std::move(letters));
  }
  std::vector<bool> cnj_set(cnj.size(), false);
  for (auto& [xy, letters] : cnj_lines) {
    auto idx = RefinedPresentation::pair_index(xy.first, xy.second);
    if (cnj_set[idx])
      throw ParseError(0, 0, "duplicate conjugacy relation for ('" +
                                 gens[xy.first - 1].name + "', '" +
                                 gens[xy.second - 1].name + "')");
    cnj_set[idx] = true;
    cnj[idx] = NormalWord::from_letters(std::move(letters));
  }

  RefinedPresentation p(std::move(gens), std::move(pow), std::move(cnj));
  auto violations = validate(p);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return p;
}

std::string format_word(const std::vector<Letter>& letters,
                        const RefinedPresentation& p) {
  if (letters.empty()) return "1";
  std::string out;
  for (const auto& l : letters) {
    if (!out.empty()) out += ' ';
    out += p.gen(l.gen).name;
    if (l.exp != 1) out += "^" + to_string(l.exp);
  }
  return out;
}

FreeWord parse_free_word(const std::string& text, const RefinedPresentation& p) {
  std::map<std::string, Gen> names;
  for (Gen g = 1; g <= p.num_generators(); ++g) names[p.gen(g).name] = g;
  auto toks = tokenize(text);
  auto letters = WordParser{names, 1}.run(toks, 0, toks.size());
  return FreeWord(std::move(letters));
}

std::string serialize(const RefinedPresentation& p) {
  std::ostringstream out;
  out << "rsp 1\n";
  const int m = p.num_generators();
  for (Gen g = 1; g <= m; ++g) {
    const auto& info = p.gen(g);
    out << "gen " << info.name << " block " << info.block << " order ";
    if (info.finite())
      out << to_string(info.order) << " prime " << info.prime;
    else
      out << "inf";
    out << "\n";
  }
  for (Gen g = 1; g <= m; ++g)
    if (p.finite(g) && !p.power_rhs(g).is_identity())
      out << "pow " << p.gen(g).name << " = " << format_word(p.power_rhs(g), p)
          << "\n";
  for (Gen y = 2; y <= m; ++y)
    for (Gen x = 1; x < y; ++x)
      if (p.conj_rhs(x, y) != NormalWord::generator(x))
        out << "cnj " << p.gen(x).name << " " << p.gen(y).name << " = "
            << format_word(p.conj_rhs(x, y), p) << "\n";
  return out.str();
}

}  // namespace rsp
