#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bidopt/lp_model.hpp"

namespace bidopt {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

std::string to_string(LpStatus s);

// Per-column bounds applied on top of the model. Fixing means lower == upper.
class Bounds {
 public:
  Bounds() = default;
  explicit Bounds(const LpModel& model);

  // Throws std::invalid_argument if lower > upper.
  void set(int column, double lower, double upper);
  void fix(int column, double value) { set(column, value, value); }

  double lower(int column) const { return lower_[column]; }
  double upper(int column) const { return upper_[column]; }
  bool is_fixed(int column) const { return lower_[column] == upper_[column]; }
  std::span<const double> lowers() const { return lower_; }
  std::span<const double> uppers() const { return upper_; }
  int size() const { return static_cast<int>(lower_.size()); }

  bool operator==(const Bounds&) const = default;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

enum class VarStatus : std::uint8_t { kBasic, kAtLower, kAtUpper, kFree };

// Basis description over structural columns followed by one logical per row.
struct Basis {
  std::vector<int> basic;
  std::vector<VarStatus> status;

  bool empty() const { return basic.empty(); }
  bool operator==(const Basis&) const = default;
};

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> primal;
  // Reduced costs c_j - y'A_j and row duals in the model's own objective
  // sense. For maximization a column at its lower bound is optimal when its
  // reduced cost is <= 0.
  std::vector<double> reduced_costs;
  std::vector<double> duals;
  long iterations = 0;
  Basis basis;

  bool optimal() const { return status == LpStatus::kOptimal; }
};

struct SimplexOptions {
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-7;
  double pivot_tol = 1e-9;
  // Consecutive degenerate pivots before switching to Bland's rule.
  int bland_after = 50;
  int refactor_interval = 100;
  // <= 0 selects 10000 + 50 * (rows + columns).
  long iteration_limit = 0;
};

// Bounded-variable primal simplex on one model. Not thread safe; use one
// solver per thread.
class SimplexSolver {
 public:
  explicit SimplexSolver(const LpModel& model, SimplexOptions options = {});
  ~SimplexSolver();
  SimplexSolver(SimplexSolver&&) noexcept;
  SimplexSolver& operator=(SimplexSolver&&) noexcept;

  LpSolution solve(const Bounds& bounds);
  // Warm start from the basis of a previous solution of the same model.
  LpSolution resolve(const LpSolution& previous, const Bounds& bounds);

  const LpModel& model() const;
  const SimplexOptions& options() const;

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
};

LpSolution solve_lp(const LpModel& model, const Bounds& bounds,
                    const SimplexOptions& options = {});
LpSolution resolve(const LpModel& model, const LpSolution& previous,
                   const Bounds& bounds, const SimplexOptions& options = {});

// Largest row violation of x, measured on rows scaled to unit max coefficient.
double max_scaled_row_violation(const LpModel& model, std::span<const double> x);

}  // namespace bidopt
