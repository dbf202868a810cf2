// Times the consistency checkers with the OpenMP instance loops enabled
// against the serial reference path on the same inputs.

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "rsp/consistency.hpp"
#include "rsp/corpus.hpp"

namespace {

double median_ms(const rsp::RefinedPresentation& p, rsp::Method method,
                 bool parallel, int reps) {
  rsp::CheckOptions opts;
  opts.parallel = parallel;
  std::vector<double> times;
  for (int r = 0; r < reps; ++r) {
    rsp::ConsistencyReport rep = method == rsp::Method::solv
                                     ? rsp::check_solv(p, opts)
                                     : rsp::check_overlap(p, opts);
    if (rep.verdict != rsp::Verdict::consistent) {
      std::fprintf(stderr, "input is not consistent; timings meaningless\n");
      std::exit(2);
    }
    times.push_back(rep.elapsed_ms);
  }
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial reference vs OpenMP check timing"};
  std::string input = "ut(12,2)";
  int reps = 3;
  app.add_option("--input", input, "family spec or file");
  app.add_option("--reps", reps, "repetitions")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  rsp::RefinedPresentation p = rsp::family_from_spec(input);
#ifdef _OPENMP
  std::printf("input %s (%d generators), %d thread(s)\n", input.c_str(),
              p.num_generators(), omp_get_max_threads());
#else
  std::printf("input %s (%d generators), OpenMP not compiled in\n",
              input.c_str(), p.num_generators());
#endif
  std::printf("%-8s %12s %12s %8s\n", "method", "serial ms", "parallel ms",
              "speedup");
  for (rsp::Method m : {rsp::Method::solv, rsp::Method::overlap}) {
    double serial = median_ms(p, m, false, reps);
    double parallel = median_ms(p, m, true, reps);
    std::printf("%-8s %12.1f %12.1f %8.2f\n", rsp::to_string(m), serial,
                parallel, parallel > 0 ? serial / parallel : 0.0);
  }
  return 0;
}
