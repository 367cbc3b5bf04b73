#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bidopt/instance.hpp"

namespace bidopt {

// Brute-force reference solvers for desk-sized instances. They work on the
// raw Instance data and never touch LpModel, so bugs in model construction
// show up as disagreements.

struct OracleOptions {
  // Upper bound on the number of enumerated patterns.
  std::uint64_t cap = 10'000'000;
  // Relative slack allowed when testing a constraint.
  double tolerance = 1e-9;
};

struct Sos1OracleResult {
  double objective = 0.0;
  std::vector<int> levels;  // chosen level per campaign, instance order
};

// An SOS2 choice for one campaign: weight on `lower_level` and
// `lower_level + 1`. Single-level choices have upper_weight == 0.
struct Sos2Choice {
  int lower_level = 0;
  double lower_weight = 1.0;
  double upper_weight = 0.0;
};

struct Sos2OracleResult {
  double objective = 0.0;
  std::vector<Sos2Choice> choices;
};

// Throws std::length_error when the pattern count exceeds options.cap.
Sos1OracleResult enumerate_sos1(const Instance& instance,
                                const OracleOptions& options = {});
Sos2OracleResult enumerate_sos2(const Instance& instance,
                                const OracleOptions& options = {});

// values[i][j] is the value of level j of campaign i (instance order).
using LevelValues = std::vector<std::vector<double>>;

struct FeasibilityCheck {
  bool feasible = true;
  double objective = 0.0;
  std::vector<std::string> problems;
};

// Recomputes every constraint from the instance. A row passes when its
// violation is at most tol * max(1, |rhs|, largest term). The SOS condition
// is exact: members above zero_tol are counted.
FeasibilityCheck check_assignment(const Instance& instance,
                                  const LevelValues& values, int sos_type,
                                  double tol = 1e-6, double zero_tol = 1e-6);

LevelValues values_from_sos1(const Instance& instance, const std::vector<int>& levels);
LevelValues values_from_sos2(const Instance& instance,
                             const std::vector<Sos2Choice>& choices);

}  // namespace bidopt
