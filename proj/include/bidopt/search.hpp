#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bidopt/instance.hpp"
#include "bidopt/lp_model.hpp"
#include "bidopt/simplex.hpp"

namespace bidopt {

enum class Permanence { kPermanent, kTemporary };

struct Fix {
  int column = 0;
  double lower = 0.0;
  double upper = 0.0;
  Permanence permanence = Permanence::kPermanent;

  bool operator==(const Fix&) const = default;
};

// Bound overrides produced by the hot-start heuristics.
class FixingSet {
 public:
  void add(int column, double lower, double upper, Permanence p) {
    entries_.push_back(Fix{column, lower, upper, p});
  }
  void fix_to(int column, double value, Permanence p) { add(column, value, value, p); }

  // Later entries win when a column appears twice.
  void apply(Bounds& bounds) const;
  void remove_temporary();
  FixingSet permanent_only() const;

  const std::vector<Fix>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  bool operator==(const FixingSet&) const = default;

 private:
  std::vector<Fix> entries_;
};

enum class Strategy { kNone, kFixNearOne, kFixOutsideNonzeros, kSos2HotStart };

// "none", "1", "2", "3".
std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

struct HeuristicOptions {
  double near_one_tol = 0.95;
  double rc_tol = 1e-5;
  double zero_tol = 1e-6;
};

// Per set: a member at or above near_one_tol is fixed to 1 and its siblings
// to 0 when it is the slack member or when every sibling has reduced cost
// below -rc_tol.
FixingSet strategy1_fix(const LpModel& model, const LpSolution& lp,
                        double near_one_tol, double rc_tol);

// Per set: a lone nonzero is fixed to 1 and the rest to 0; otherwise the
// members outside [first nonzero, last nonzero] are fixed to 0.
FixingSet strategy2_fix(const LpModel& model, const LpSolution& lp, double zero_tol);

// Total rollback: every heuristic fix is withdrawn.
FixingSet rollback_on_infeasible(const FixingSet& fixes, const LpSolution& lp);

struct HotStart {
  FixingSet permanent;
  // The temporaries that were applied for the resolve; already withdrawn.
  FixingSet temporary;
  // SOS2-feasible resolve result, if the resolve was feasible.
  std::optional<LpSolution> incumbent;
};

// Zero-flags members outside each set's nonzero range, temporarily pins
// every unsatisfied set to its current interval, and resolves. `bounds` are
// the bounds `lp` was solved under.
HotStart strategy3_hotstart(SimplexSolver& solver, const Bounds& bounds,
                            const LpSolution& lp, double zero_tol);

// Violation of one set at x: SOS1 counts nonzeros beyond the first, SOS2
// counts the span of the nonzeros beyond two. Zero means satisfied.
int sos_violation(const SosSet& set, std::span<const double> x, double zero_tol);

// Largest member position whose reference weight is <= the weighted average
// of the set at x.
int split_position(const SosSet& set, std::span<const double> x);

struct BranchSplit {
  int split = 0;
  // Member positions fixed to zero in each child.
  std::vector<int> left_zero;
  std::vector<int> right_zero;
};

// Branching dichotomy for a violated set. SOS1: left keeps positions <= r,
// right keeps positions > r. SOS2: left keeps <= r, right keeps >= r. The
// split is moved inward so that both children exclude x.
BranchSplit sos_branch(const SosSet& set, std::span<const double> x, double zero_tol);

// Convex combination of the bids of the nonzero levels. Absent for a
// slack-only choice or when a nonzero level carries no bid.
std::optional<double> interpolate_bid(const Campaign& campaign,
                                      std::span<const double> level_values,
                                      double zero_tol = 1e-6);

struct Degradation {
  double value = 0.0;
  // False when the LP bound is zero and the value is an absolute difference.
  bool relative = true;
};

Degradation degradation(double lp_bound, double incumbent);

// Cut-callback seam: rows returned here are appended to the root model for
// strategies none, 1 and 2. None are shipped.
using CutGenerator = std::function<std::vector<Row>(const LpModel&, const LpSolution&)>;

struct SearchLimits {
  double time_limit_seconds = std::numeric_limits<double>::infinity();
  long node_limit = 0;  // <= 0 means unlimited
  double gap = 1e-4;
  bool first_solution = true;
};

struct SearchOptions {
  Strategy strategy = Strategy::kNone;
  SearchLimits limits;
  HeuristicOptions heuristics;
  SimplexOptions simplex;
  std::vector<CutGenerator> cut_generators;
};

enum class SearchStatus {
  kOptimal,        // tree exhausted, incumbent proven within gap
  kFirstSolution,  // stopped at the first incumbent
  kTimeLimit,
  kNodeLimit,
  kInfeasible,
  kLpFailure,      // root LP unbounded or out of iterations
};

std::string to_string(SearchStatus s);

enum class IncumbentSource { kNone, kHotStart, kTree };

struct SolveReport {
  SearchStatus status = SearchStatus::kInfeasible;
  bool has_incumbent = false;
  double incumbent_objective = 0.0;
  double lp_relaxation_objective = 0.0;
  Degradation degradation;
  double first_solution_objective = 0.0;
  Degradation first_solution_degradation;
  double first_solution_seconds = 0.0;
  IncumbentSource first_solution_source = IncumbentSource::kNone;
  double total_seconds = 0.0;
  long nodes = 0;
  long lp_iterations = 0;
  int sos_count = 0;
  Strategy strategy = Strategy::kNone;
  int sos_type_used = 1;
  int fixes_applied = 0;
  bool rolled_back = false;
};

struct SearchResult {
  SolveReport report;
  // One value per model column; empty without an incumbent.
  std::vector<double> solution;
};

// Strategy 3 runs on the SOS2 relaxation of `model`; the other strategies use
// the set types as given. Throws InputError on a malformed model.
SearchResult branch_and_bound(const LpModel& model, const SearchOptions& options = {});

// True when every set of `model` is satisfied by x under its own type.
bool sos_feasible(const LpModel& model, std::span<const double> x, double zero_tol);

}  // namespace bidopt
