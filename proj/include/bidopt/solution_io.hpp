#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bidopt/instance.hpp"
#include "bidopt/lp_model.hpp"
#include "bidopt/oracle.hpp"
#include "bidopt/search.hpp"

namespace bidopt {

struct SolutionWriteOptions {
  // Prints "-" for wall-clock fields so that repeated runs are byte-identical.
  bool omit_timing = false;
  // Replaces the STRATEGY value, e.g. "oracle".
  std::string strategy_label;
};

// Header lines STATUS, OBJECTIVE, LP_BOUND, DEGRADATION_PCT, STRATEGY,
// SOS_TYPE, SECONDS, NODES; then "COLUMN <name> <value>" for each nonzero
// column and, when an instance is given, "BID <campaign> <bid>" for each
// campaign with an interpolated bid. Reals are printed with 12 decimals.
std::string write_solution(const SolveReport& report, std::span<const double> solution,
                           const LpModel& model, const Instance* instance,
                           const SolutionWriteOptions& options = {});

struct SolutionFile {
  std::map<std::string, std::string> header;
  std::vector<std::pair<std::string, double>> columns;
  std::vector<std::pair<std::string, double>> bids;
};

// Throws InputError with a line number on malformed input.
SolutionFile parse_solution(const std::string& text);

// Rebuilds level values from the COLUMN lines and checks them against the
// raw instance data; a stated OBJECTIVE must match the recomputed one.
FeasibilityCheck verify_solution(const Instance& instance, const SolutionFile& file,
                                 int sos_type, double tol = 1e-6, double zero_tol = 1e-6);

// Fixed 12-decimal rendering used by the solution file.
std::string format_fixed12(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace bidopt
