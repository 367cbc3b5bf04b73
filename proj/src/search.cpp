#include "bidopt/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "bidopt/errors.hpp"

namespace bidopt {

void FixingSet::apply(Bounds& bounds) const {
  for (const auto& f : entries_) bounds.set(f.column, f.lower, f.upper);
}

void FixingSet::remove_temporary() {
  std::erase_if(entries_, [](const Fix& f) { return f.permanence == Permanence::kTemporary; });
}

FixingSet FixingSet::permanent_only() const {
  FixingSet out = *this;
  out.remove_temporary();
  return out;
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kNone: return "none";
    case Strategy::kFixNearOne: return "1";
    case Strategy::kFixOutsideNonzeros: return "2";
    case Strategy::kSos2HotStart: return "3";
  }
  return "none";
}

Strategy strategy_from_string(const std::string& s) {
  if (s == "none") return Strategy::kNone;
  if (s == "1") return Strategy::kFixNearOne;
  if (s == "2") return Strategy::kFixOutsideNonzeros;
  if (s == "3") return Strategy::kSos2HotStart;
  throw InputError("unknown strategy '" + s + "' (expected none, 1, 2 or 3)");
}

std::string to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::kOptimal: return "optimal";
    case SearchStatus::kFirstSolution: return "first-solution";
    case SearchStatus::kTimeLimit: return "time-limit";
    case SearchStatus::kNodeLimit: return "node-limit";
    case SearchStatus::kInfeasible: return "infeasible";
    case SearchStatus::kLpFailure: return "lp-failure";
  }
  return "unknown";
}

namespace {

struct NonzeroRange {
  int first = -1;
  int last = -1;
  int count = 0;
};

NonzeroRange nonzero_range(const SosSet& set, std::span<const double> x, double zero_tol) {
  NonzeroRange r;
  for (std::size_t p = 0; p < set.members.size(); ++p) {
    if (x[set.members[p]] > zero_tol) {
      if (r.first < 0) r.first = static_cast<int>(p);
      r.last = static_cast<int>(p);
      ++r.count;
    }
  }
  return r;
}

int sos2_violation(const NonzeroRange& r) {
  if (r.count == 0) return 0;
  return std::max(0, (r.last - r.first + 1) - 2);
}

}  // namespace

int sos_violation(const SosSet& set, std::span<const double> x, double zero_tol) {
  const NonzeroRange r = nonzero_range(set, x, zero_tol);
  if (set.type == 1) return std::max(0, r.count - 1);
  return sos2_violation(r);
}

bool sos_feasible(const LpModel& model, std::span<const double> x, double zero_tol) {
  for (const auto& set : model.sos_sets())
    if (sos_violation(set, x, zero_tol) > 0) return false;
  return true;
}

int split_position(const SosSet& set, std::span<const double> x) {
  double sum = 0.0, weighted = 0.0;
  for (std::size_t p = 0; p < set.members.size(); ++p) {
    const double v = x[set.members[p]];
    sum += v;
    weighted += set.weights[p] * v;
  }
  if (sum <= 0.0) return 0;
  const double average = weighted / sum;
  int r = 0;
  for (std::size_t p = 0; p < set.weights.size(); ++p)
    if (set.weights[p] <= average) r = static_cast<int>(p);
  return r;
}

BranchSplit sos_branch(const SosSet& set, std::span<const double> x, double zero_tol) {
  const NonzeroRange nz = nonzero_range(set, x, zero_tol);
  if (nz.count < 2) throw std::invalid_argument("sos_branch: set is not violated");
  BranchSplit out;
  int r = split_position(set, x);
  const int size = static_cast<int>(set.members.size());
  if (set.type == 1) {
    r = std::clamp(r, nz.first, nz.last - 1);
    for (int p = r + 1; p < size; ++p) out.left_zero.push_back(p);
    for (int p = 0; p <= r; ++p) out.right_zero.push_back(p);
  } else {
    r = std::clamp(r, nz.first + 1, nz.last - 1);
    for (int p = r + 1; p < size; ++p) out.left_zero.push_back(p);
    for (int p = 0; p < r; ++p) out.right_zero.push_back(p);
  }
  out.split = r;
  return out;
}

FixingSet strategy1_fix(const LpModel& model, const LpSolution& lp, double near_one_tol,
                        double rc_tol) {
  // Positive means raising the variable would improve the objective.
  const double improving = model.sense == ObjectiveSense::kMaximize ? 1.0 : -1.0;
  FixingSet out;
  for (const auto& set : model.sos_sets()) {
    int chosen = -1;
    for (std::size_t p = 0; p < set.members.size(); ++p) {
      const double v = lp.primal[set.members[p]];
      if (v >= near_one_tol && (chosen < 0 || v > lp.primal[set.members[chosen]]))
        chosen = static_cast<int>(p);
    }
    if (chosen < 0) continue;
    bool accept = chosen == 0;
    if (!accept) {
      accept = true;
      for (std::size_t p = 0; p < set.members.size() && accept; ++p) {
        if (static_cast<int>(p) == chosen) continue;
        accept = improving * lp.reduced_costs[set.members[p]] < -rc_tol;
      }
    }
    if (!accept) continue;
    for (std::size_t p = 0; p < set.members.size(); ++p)
      out.fix_to(set.members[p], static_cast<int>(p) == chosen ? 1.0 : 0.0,
                 Permanence::kPermanent);
  }
  return out;
}

FixingSet strategy2_fix(const LpModel& model, const LpSolution& lp, double zero_tol) {
  FixingSet out;
  for (const auto& set : model.sos_sets()) {
    const NonzeroRange nz = nonzero_range(set, lp.primal, zero_tol);
    if (nz.count == 0) continue;
    const int size = static_cast<int>(set.members.size());
    if (nz.count == 1) {
      for (int p = 0; p < size; ++p)
        out.fix_to(set.members[p], p == nz.first ? 1.0 : 0.0, Permanence::kPermanent);
      continue;
    }
    for (int p = 0; p < size; ++p)
      if (p < nz.first || p > nz.last)
        out.fix_to(set.members[p], 0.0, Permanence::kPermanent);
  }
  return out;
}

FixingSet rollback_on_infeasible(const FixingSet&, const LpSolution&) { return {}; }

HotStart strategy3_hotstart(SimplexSolver& solver, const Bounds& bounds, const LpSolution& lp,
                            double zero_tol) {
  const LpModel& model = solver.model();
  HotStart out;
  for (const auto& set : model.sos_sets()) {
    const NonzeroRange nz = nonzero_range(set, lp.primal, zero_tol);
    if (nz.count == 0) continue;
    const int size = static_cast<int>(set.members.size());
    for (int p = 0; p < size; ++p) {
      if (p >= nz.first && p <= nz.last) continue;
      if (bounds.lower(set.members[p]) > 0.0) continue;
      out.permanent.fix_to(set.members[p], 0.0, Permanence::kPermanent);
    }
    if (sos2_violation(nz) == 0) continue;
    // Current interval: the adjacent pair bracketing the weighted average.
    int lo = split_position(set, lp.primal);
    if (lo + 1 >= size) lo = size - 2;
    for (int p = nz.first; p <= nz.last; ++p) {
      if (p == lo || p == lo + 1) continue;
      if (bounds.lower(set.members[p]) > 0.0) continue;
      out.temporary.fix_to(set.members[p], 0.0, Permanence::kTemporary);
    }
  }

  Bounds pinned = bounds;
  out.permanent.apply(pinned);
  out.temporary.apply(pinned);
  LpSolution resolved = solver.resolve(lp, pinned);
  if (!resolved.optimal()) return out;
  for (const auto& set : model.sos_sets())
    if (sos2_violation(nonzero_range(set, resolved.primal, zero_tol)) > 0) return out;
  out.incumbent = std::move(resolved);
  return out;
}

std::optional<double> interpolate_bid(const Campaign& campaign,
                                      std::span<const double> level_values, double zero_tol) {
  double weight = 0.0, total = 0.0;
  bool beyond_slack = false;
  for (std::size_t j = 0; j < campaign.levels.size() && j < level_values.size(); ++j) {
    const double x = level_values[j];
    if (x <= zero_tol) continue;
    const auto& bid = campaign.levels[j].bid;
    if (!bid) return std::nullopt;
    if (campaign.levels[j].level_index != 0) beyond_slack = true;
    weight += x;
    total += x * *bid;
  }
  if (!beyond_slack || weight <= 0.0) return std::nullopt;
  return total / weight;
}

Degradation degradation(double lp_bound, double incumbent) {
  if (lp_bound != 0.0) return {100.0 * (lp_bound - incumbent) / std::abs(lp_bound), true};
  if (incumbent == 0.0) return {0.0, true};
  return {std::abs(lp_bound - incumbent), false};
}

namespace {

using Clock = std::chrono::steady_clock;

// Persistent list of columns fixed to zero by branching, shared by subtrees.
struct BoundChange {
  std::shared_ptr<const BoundChange> parent;
  std::vector<int> zero_columns;
};

struct Node {
  std::shared_ptr<const BoundChange> changes;
  std::shared_ptr<const LpSolution> lp;
  double bound = 0.0;
  int depth = 0;
  long order = 0;
};

struct BestBoundFirst {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.order > b.order;
  }
};

class Search {
 public:
  Search(const LpModel& model, const SearchOptions& opt)
      : model_(opt.strategy == Strategy::kSos2HotStart ? relax_to_sos2(model) : model),
        opt_(opt),
        start_(Clock::now()) {
    rep_.strategy = opt.strategy;
    rep_.sos_count = static_cast<int>(model_.sos_sets().size());
    rep_.sos_type_used = 1;
    for (const auto& s : model_.sos_sets()) rep_.sos_type_used = std::max(rep_.sos_type_used, s.type);
    maximize_ = model_.sense == ObjectiveSense::kMaximize;
  }

  SearchResult run() {
    solver_ = std::make_unique<SimplexSolver>(model_, opt_.simplex);
    const Bounds base(model_);
    const LpSolution root = solver_->solve(base);
    rep_.nodes = 1;
    rep_.lp_iterations += root.iterations;
    if (!root.optimal()) {
      rep_.status = root.status == LpStatus::kInfeasible ? SearchStatus::kInfeasible
                                                         : SearchStatus::kLpFailure;
      return finish();
    }
    rep_.lp_relaxation_objective = root.objective;
    // Strategy 3 always goes through its hot start, even when the root is
    // already SOS2-feasible.
    if (opt_.strategy != Strategy::kSos2HotStart &&
        sos_feasible(model_, root.primal, zero_tol()) &&
        offer(root.primal, IncumbentSource::kTree)) {
      rep_.status = SearchStatus::kOptimal;
      return finish();
    }

    Bounds start_bounds = base;
    LpSolution start_lp = root;
    FixingSet fixes;
    switch (opt_.strategy) {
      case Strategy::kNone: break;
      case Strategy::kFixNearOne:
      case Strategy::kFixOutsideNonzeros:
        fixes = opt_.strategy == Strategy::kFixNearOne
                    ? strategy1_fix(model_, root, opt_.heuristics.near_one_tol, opt_.heuristics.rc_tol)
                    : strategy2_fix(model_, root, zero_tol());
        break;
      case Strategy::kSos2HotStart: {
        HotStart hot = strategy3_hotstart(*solver_, base, root, zero_tol());
        fixes = hot.permanent;
        if (hot.incumbent) {
          rep_.lp_iterations += hot.incumbent->iterations;
          offer(hot.incumbent->primal, IncumbentSource::kHotStart);
        }
        break;
      }
    }
    if (!fixes.empty()) {
      Bounds fixed = base;
      fixes.apply(fixed);
      LpSolution lp = solver_->resolve(root, fixed);
      rep_.lp_iterations += lp.iterations;
      if (lp.optimal()) {
        start_bounds = std::move(fixed);
        start_lp = std::move(lp);
        rep_.fixes_applied = static_cast<int>(fixes.size());
      } else {
        fixes = rollback_on_infeasible(fixes, lp);
        rep_.rolled_back = true;
      }
    }
    if (have_incumbent_ && prunable(root.objective)) {
      rep_.status = SearchStatus::kOptimal;
      return finish();
    }
    if (have_incumbent_ && opt_.limits.first_solution) {
      rep_.status = SearchStatus::kFirstSolution;
      return finish();
    }

    if (opt_.strategy != Strategy::kSos2HotStart && !opt_.cut_generators.empty())
      apply_cuts(start_bounds, start_lp);

    if (!start_lp.optimal()) {
      rep_.status = SearchStatus::kLpFailure;
      return finish();
    }
    rep_.status = tree_search(start_bounds, start_lp);
    // Fixing can cut off every SOS-feasible point; search again without it.
    if (rep_.status == SearchStatus::kOptimal && !have_incumbent_ && rep_.fixes_applied > 0) {
      rep_.rolled_back = true;
      rep_.fixes_applied = 0;
      rep_.status = tree_search(base, root);
    }
    return finish();
  }

 private:
  double zero_tol() const { return opt_.heuristics.zero_tol; }

  // Internal comparisons are in "larger is better" form.
  double score(double objective) const { return maximize_ ? objective : -objective; }

  double elapsed() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }

  bool out_of_time() const { return elapsed() >= opt_.limits.time_limit_seconds; }

  bool prunable(double objective) const {
    if (!have_incumbent_) return false;
    const double inc = score(incumbent_objective_);
    const double slack = opt_.limits.gap * std::abs(inc) + 1e-9 * std::max(1.0, std::abs(inc));
    return score(objective) <= inc + slack;
  }

  // Values within zero_tol of zero inside a set become exact zeros; a lone
  // SOS1 member close to one becomes exactly one. The removed mass moves onto
  // the kept members so that set sums are unchanged.
  std::vector<double> clean(std::span<const double> primal) const {
    std::vector<double> x(primal.begin(), primal.end());
    for (int j = 0; j < model_.num_columns(); ++j)
      x[j] = std::clamp(x[j], model_.columns()[j].lower, model_.columns()[j].upper);
    for (const auto& set : model_.sos_sets()) {
      int kept = 0, last = -1;
      double removed = 0.0, kept_sum = 0.0;
      for (int m : set.members) {
        if (std::abs(x[m]) <= zero_tol()) {
          removed += x[m];
          x[m] = 0.0;
        } else {
          ++kept;
          last = m;
          kept_sum += x[m];
        }
      }
      if (kept > 0 && removed != 0.0 && kept_sum > 0.0) {
        const double factor = (kept_sum + removed) / kept_sum;
        for (int m : set.members) x[m] *= factor;
      }
      if (set.type == 1 && kept == 1 && std::abs(x[last] - 1.0) <= 1e-6 &&
          model_.columns()[last].upper >= 1.0)
        x[last] = 1.0;
    }
    return x;
  }

  // Returns false when the cleaned point no longer satisfies the rows, in
  // which case the caller has to keep branching.
  bool offer(std::span<const double> primal, IncumbentSource source) {
    std::vector<double> x = clean(primal);
    if (max_scaled_row_violation(model_, x) > opt_.simplex.feasibility_tol) return false;
    const double obj = model_.objective_value(x);
    if (!have_incumbent_) {
      rep_.first_solution_objective = obj;
      rep_.first_solution_seconds = elapsed();
      rep_.first_solution_source = source;
    } else if (score(obj) <= score(incumbent_objective_)) {
      return true;
    }
    have_incumbent_ = true;
    incumbent_objective_ = obj;
    incumbent_ = std::move(x);
    return true;
  }

  void apply_cuts(const Bounds& bounds, LpSolution& lp) {
    std::vector<Row> cuts;
    for (const auto& gen : opt_.cut_generators) {
      auto rows = gen(model_, lp);
      cuts.insert(cuts.end(), std::make_move_iterator(rows.begin()),
                  std::make_move_iterator(rows.end()));
    }
    if (cuts.empty()) return;
    solver_.reset();
    for (auto& r : cuts) model_.add_row(std::move(r));
    solver_ = std::make_unique<SimplexSolver>(model_, opt_.simplex);
    lp = solver_->solve(bounds);
    rep_.lp_iterations += lp.iterations;
  }

  int most_violated(std::span<const double> x, double threshold) const {
    int best = -1, worst = 0;
    for (std::size_t s = 0; s < model_.sos_sets().size(); ++s) {
      const int v = sos_violation(model_.sos_sets()[s], x, threshold);
      if (v > worst) {
        worst = v;
        best = static_cast<int>(s);
      }
    }
    return best;
  }

  static Bounds materialize(const Bounds& start, const std::shared_ptr<const BoundChange>& chain) {
    Bounds b = start;
    for (const BoundChange* c = chain.get(); c; c = c->parent.get())
      for (int col : c->zero_columns) b.set(col, std::min(b.lower(col), 0.0), 0.0);
    return b;
  }

  // Returns the child's LP, or nothing when the child is infeasible.
  std::optional<LpSolution> evaluate(const LpSolution& parent, const Bounds& bounds) {
    ++rep_.nodes;
    LpSolution lp = solver_->resolve(parent, bounds);
    rep_.lp_iterations += lp.iterations;
    if (lp.status == LpStatus::kIterationLimit) {
      lp = solver_->solve(bounds);
      rep_.lp_iterations += lp.iterations;
    }
    if (!lp.optimal()) return std::nullopt;
    // Only the basis and the primal values are needed further down.
    lp.duals.clear();
    lp.duals.shrink_to_fit();
    lp.reduced_costs.clear();
    lp.reduced_costs.shrink_to_fit();
    return lp;
  }

  bool node_budget_left() const {
    return opt_.limits.node_limit <= 0 || rep_.nodes < opt_.limits.node_limit;
  }

  SearchStatus tree_search(const Bounds& start_bounds, const LpSolution& start_lp) {
    std::vector<Node> stack;
    std::priority_queue<Node, std::vector<Node>, BestBoundFirst> heap;
    bool best_first = have_incumbent_;
    long order = 0;
    auto push = [&](Node n) {
      if (best_first)
        heap.push(std::move(n));
      else
        stack.push_back(std::move(n));
    };
    auto switch_to_best_first = [&] {
      if (best_first) return;
      best_first = true;
      for (auto& n : stack) heap.push(std::move(n));
      stack.clear();
    };

    push(Node{nullptr, std::make_shared<const LpSolution>(start_lp), score(start_lp.objective), 0,
              order++});
    while (!stack.empty() || !heap.empty()) {
      if (out_of_time()) return SearchStatus::kTimeLimit;
      Node node;
      if (best_first) {
        node = heap.top();
        heap.pop();
      } else {
        node = std::move(stack.back());
        stack.pop_back();
      }
      if (prunable(maximize_ ? node.bound : -node.bound)) continue;

      double threshold = zero_tol();
      int s = most_violated(node.lp->primal, threshold);
      if (s < 0) {
        if (offer(node.lp->primal, IncumbentSource::kTree)) {
          if (opt_.limits.first_solution) return SearchStatus::kFirstSolution;
          switch_to_best_first();
          continue;
        }
        // Cleaning broke a row: branch on every positive value instead.
        threshold = 0.0;
        s = most_violated(node.lp->primal, threshold);
        if (s < 0) continue;
      }
      const SosSet& set = model_.sos_sets()[s];
      const BranchSplit split = sos_branch(set, node.lp->primal, threshold);
      const Bounds bounds = materialize(start_bounds, node.changes);

      struct Child {
        std::shared_ptr<const BoundChange> changes;
        std::shared_ptr<const LpSolution> lp;
      };
      std::vector<Child> children;
      bool found = false;
      for (const auto* zero : {&split.left_zero, &split.right_zero}) {
        if (!node_budget_left()) return SearchStatus::kNodeLimit;
        auto change = std::make_shared<BoundChange>();
        change->parent = node.changes;
        Bounds child = bounds;
        bool empty = false;
        for (int p : *zero) {
          const int col = set.members[p];
          if (child.lower(col) > 0.0) empty = true;
          change->zero_columns.push_back(col);
          if (!empty) child.set(col, child.lower(col), 0.0);
        }
        if (empty) continue;
        auto lp = evaluate(*node.lp, child);
        if (!lp || prunable(lp->objective)) continue;
        if (sos_feasible(model_, lp->primal, zero_tol()) &&
            offer(lp->primal, IncumbentSource::kTree)) {
          found = true;
          continue;
        }
        children.push_back(Child{std::move(change), std::make_shared<const LpSolution>(std::move(*lp))});
      }
      if (found) {
        if (opt_.limits.first_solution) return SearchStatus::kFirstSolution;
        switch_to_best_first();
      }
      // Depth-first dives into the better child; the left one on ties.
      if (children.size() == 2 && score(children[1].lp->objective) > score(children[0].lp->objective))
        std::swap(children[0], children[1]);
      for (auto it = children.rbegin(); it != children.rend(); ++it) {
        if (prunable(it->lp->objective)) continue;
        push(Node{it->changes, it->lp, score(it->lp->objective), node.depth + 1, order++});
      }
    }
    return SearchStatus::kOptimal;
  }

  SearchResult finish() {
    rep_.total_seconds = elapsed();
    rep_.has_incumbent = have_incumbent_;
    if (have_incumbent_) {
      rep_.incumbent_objective = incumbent_objective_;
      rep_.degradation = degradation(rep_.lp_relaxation_objective, incumbent_objective_);
      rep_.first_solution_degradation =
          degradation(rep_.lp_relaxation_objective, rep_.first_solution_objective);
    }
    SearchResult out;
    out.report = rep_;
    out.solution = std::move(incumbent_);
    return out;
  }

  LpModel model_;
  SearchOptions opt_;
  Clock::time_point start_;
  std::unique_ptr<SimplexSolver> solver_;
  SolveReport rep_;
  bool maximize_ = true;
  bool have_incumbent_ = false;
  double incumbent_objective_ = 0.0;
  std::vector<double> incumbent_;
};

}  // namespace

SearchResult branch_and_bound(const LpModel& model, const SearchOptions& options) {
  const auto problems = model.check();
  if (!problems.empty()) throw InputError("malformed model: " + problems.front());
  Search search(model, options);
  return search.run();
}

}  // namespace bidopt
