#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rsp/collector.hpp"
#include "rsp/consistency.hpp"
#include "rsp/corpus.hpp"
#include "rsp/presentation.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInconsistent = 1;
constexpr int kExitError = 2;

std::uint64_t step_limit_from_env() {
  const char* v = std::getenv("RSP_STEP_LIMIT");
  if (!v || !*v) return rsp::CollectOptions{}.step_limit;
  char* end = nullptr;
  unsigned long long parsed = std::strtoull(v, &end, 10);
  if (!end || *end || parsed == 0) {
    std::cerr << "warning: ignoring malformed RSP_STEP_LIMIT='" << v << "'\n";
    return rsp::CollectOptions{}.step_limit;
  }
  return parsed;
}

rsp::RefinedPresentation load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return rsp::parse(buf.str());
}

// Inputs to bench may be family specs or file paths; try the spec form
// first.
rsp::RefinedPresentation load_input(const std::string& text) {
  try {
    return rsp::family_from_spec(text);
  } catch (const std::invalid_argument&) {
    return load_file(text);
  }
}

int cmd_validate(const std::string& path) {
  std::string text;
  {
    std::ifstream in(path);
    if (!in) {
      std::cerr << "error: cannot open '" << path << "'\n";
      return kExitError;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  try {
    rsp::RefinedPresentation p = rsp::parse(text);
    std::cout << "ok: " << p.num_generators() << " generator(s), "
              << p.num_blocks() << " block(s)\n";
    return kExitOk;
  } catch (const rsp::ValidationError& e) {
    for (const auto& v : e.violations)
      std::cout << v.constraint << ": " << v.message << "\n";
    return kExitInconsistent;
  } catch (const rsp::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitError;
  }
}

int cmd_nf(const std::string& path, const std::string& word,
           const rsp::CheckOptions& opts) {
  rsp::RefinedPresentation p = load_file(path);
  rsp::MuTable mu;
  rsp::ConsistencyReport rep = rsp::check_solv(p, opts, &mu);
  if (rep.verdict == rsp::Verdict::aborted) {
    std::cerr << "error: consistency check aborted: " << rep.diagnostic << "\n";
    return kExitError;
  }
  if (rep.verdict == rsp::Verdict::inconsistent) {
    std::cerr << "error: presentation is inconsistent; normal forms are not "
                 "well defined\n"
              << rsp::report_to_text(rep, p) << "\n";
    return kExitInconsistent;
  }
  rsp::FreeWord w = rsp::parse_free_word(word, p);
  rsp::CollectStats st;
  rsp::NormalWord nf =
      rsp::collect(w, rsp::whole(p), mu, {opts.step_limit}, &st);
  std::cout << rsp::format_word(nf, p) << "\n";
  return kExitOk;
}

int verdict_exit(rsp::Verdict v) {
  switch (v) {
    case rsp::Verdict::consistent: return kExitOk;
    case rsp::Verdict::inconsistent: return kExitInconsistent;
    default: return kExitError;
  }
}

int cmd_check(const std::string& path, const std::string& method, bool json,
              const rsp::CheckOptions& opts) {
  rsp::RefinedPresentation p = load_file(path);
  if (method == "both") {
    rsp::MethodComparison c = rsp::compare_methods(p, opts);
    if (json) {
      std::cout << rsp::comparison_to_json(c, p) << "\n";
    } else {
      std::cout << rsp::report_to_text(c.solv, p) << "\n"
                << rsp::report_to_text(c.overlap, p) << "\n"
                << (c.agree ? "methods agree" : "methods disagree") << "\n";
    }
    if (!c.agree) return kExitError;
    return verdict_exit(c.solv.verdict);
  }
  rsp::ConsistencyReport rep = method == "solv" ? rsp::check_solv(p, opts)
                                                : rsp::check_overlap(p, opts);
  std::cout << (json ? rsp::report_to_json(rep, p) : rsp::report_to_text(rep, p))
            << "\n";
  return verdict_exit(rep.verdict);
}

int cmd_gen(const std::string& spec, const std::string& out_path) {
  rsp::RefinedPresentation p = rsp::family_from_spec(spec);
  std::string text = rsp::serialize(p);
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "error: cannot write '" << out_path << "'\n";
    return kExitError;
  }
  out << text;
  return kExitOk;
}

struct BenchRecord {
  std::string input;
  int gens = 0;
  std::string method;
  std::string verdict;
  double ms = 0.0;
  std::uint64_t steps = 0;
  int reps = 0;
};

int cmd_bench(const std::vector<std::string>& inputs,
              std::vector<std::string> methods, int reps, bool json,
              const rsp::CheckOptions& opts) {
  if (methods.empty()) methods = {"solv", "overlap"};
  std::vector<BenchRecord> records;
  bool any_inconsistent = false;
  bool any_abort = false;
  for (const auto& input : inputs) {
    rsp::RefinedPresentation p = load_input(input);
    for (const auto& method : methods) {
      std::vector<double> times;
      rsp::ConsistencyReport last;
      for (int r = 0; r < reps; ++r) {
        last = method == "solv" ? rsp::check_solv(p, opts)
                                : rsp::check_overlap(p, opts);
        times.push_back(last.elapsed_ms);
      }
      std::sort(times.begin(), times.end());
      BenchRecord rec;
      rec.input = input;
      rec.gens = p.num_generators();
      rec.method = method;
      rec.verdict = rsp::to_string(last.verdict);
      rec.ms = times[times.size() / 2];
      rec.steps = last.steps;
      rec.reps = reps;
      records.push_back(rec);
      if (last.verdict == rsp::Verdict::inconsistent) any_inconsistent = true;
      if (last.verdict == rsp::Verdict::aborted) any_abort = true;
    }
  }
  if (json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records)
      arr.push_back({{"input", r.input},
                     {"gens", r.gens},
                     {"method", r.method},
                     {"verdict", r.verdict},
                     {"ms", r.ms},
                     {"steps", r.steps},
                     {"reps", r.reps}});
    std::cout << arr.dump(2) << "\n";
  } else {
    std::printf("%-20s %6s %-8s %-12s %12s %14s\n", "input", "gens", "method",
                "verdict", "ms", "steps");
    for (const auto& r : records)
      std::printf("%-20s %6d %-8s %-12s %12.1f %14llu\n", r.input.c_str(),
                  r.gens, r.method.c_str(), r.verdict.c_str(), r.ms,
                  static_cast<unsigned long long>(r.steps));
  }
  if (any_abort) return kExitError;
  if (any_inconsistent) return kExitInconsistent;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"toolkit for group presentations with collection, consistency "
               "checking and benchmark corpora"};
  app.require_subcommand(1);

  rsp::CheckOptions opts;
  opts.step_limit = step_limit_from_env();
  app.add_flag_callback("--serial", [&] { opts.parallel = false; },
                        "run checks on the serial reference path");

  std::string file;
  std::string word;
  std::string method = "both";
  std::string mode = "incremental";
  std::string spec;
  std::string out_path;
  std::vector<std::string> inputs;
  std::vector<std::string> methods;
  int reps = 3;
  bool json = false;

  CLI::App* validate = app.add_subcommand(
      "validate", "parse a presentation file and report violations");
  validate->add_option("file", file, "presentation file")->required();

  CLI::App* nf = app.add_subcommand(
      "nf", "collect a word of a consistent presentation to normal form");
  nf->add_option("file", file, "presentation file")->required();
  nf->add_option("word", word, "word, e.g. 'x2^-1 x1^3 x2'")->required();

  CLI::App* check =
      app.add_subcommand("check", "run consistency checks on a presentation");
  check->add_option("file", file, "presentation file")->required();
  check->add_option("--method", method, "solv, overlap or both")
      ->check(CLI::IsMember({"solv", "overlap", "both"}));
  check->add_option("--mode", mode, "incremental or per_z")
      ->check(CLI::IsMember({"incremental", "per_z"}));
  check->add_flag("--json", json, "emit a JSON report");

  CLI::App* gen =
      app.add_subcommand("gen", "write a presentation from a family spec");
  gen->add_option("family", spec, "e.g. 'ut(12,2)' or 'dihedral(16)'")
      ->required();
  gen->add_option("-o,--out", out_path, "output file (default stdout)");

  CLI::App* bench = app.add_subcommand(
      "bench", "time the consistency checkers over a set of inputs");
  bench->add_option("--inputs", inputs, "family specs or presentation files")
      ->required()
      ->expected(-1);
  bench->add_option("--methods", methods, "subset of {solv, overlap}")
      ->expected(-1)
      ->check(CLI::IsMember({"solv", "overlap"}));
  bench->add_option("--reps", reps, "repetitions per input and method")
      ->check(CLI::PositiveNumber);
  bench->add_flag("--json", json, "emit JSON records");

  CLI11_PARSE(app, argc, argv);
  opts.mode = mode == "per_z" ? rsp::CheckMode::per_z : rsp::CheckMode::incremental;

  try {
    if (app.got_subcommand(validate)) return cmd_validate(file);
    if (app.got_subcommand(nf)) return cmd_nf(file, word, opts);
    if (app.got_subcommand(check)) return cmd_check(file, method, json, opts);
    if (app.got_subcommand(gen)) return cmd_gen(spec, out_path);
    if (app.got_subcommand(bench))
      return cmd_bench(inputs, methods, reps, json, opts);
  } catch (const rsp::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInconsistent;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
