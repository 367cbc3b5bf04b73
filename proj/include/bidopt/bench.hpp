#pragma once

#include <string>
#include <vector>

#include "bidopt/instance.hpp"
#include "bidopt/search.hpp"

namespace bidopt {

struct BenchCase {
  std::string label;
  Instance instance;
};

struct BenchOptions {
  std::vector<Strategy> strategies{Strategy::kFixNearOne, Strategy::kFixOutsideNonzeros,
                                   Strategy::kSos2HotStart};
  // Each run keeps searching after the first incumbent, within these limits,
  // to find the best known solution. first_solution is ignored.
  SearchLimits limits;
  HeuristicOptions heuristics;
  SimplexOptions simplex;
};

struct BenchRow {
  std::string label;
  int sos_count = 0;
  Strategy strategy = Strategy::kNone;
  SolveReport report;
};

std::vector<BenchRow> run_benchmark(const std::vector<BenchCase>& cases,
                                    const BenchOptions& options);

// Columns: model, sos_count, strategy, degradation_pct,
// first_solution_seconds, best_known_degradation_pct. Degradations have 4
// decimals and times 3. A run without any incumbent shows "????" for the
// degradations and ">limit" for the time.
std::string bench_csv(const std::vector<BenchRow>& rows, bool omit_timing = false);

}  // namespace bidopt
