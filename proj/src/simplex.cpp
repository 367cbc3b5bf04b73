#include "bidopt/simplex.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bidopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Power-of-two factor bringing the largest magnitude of the row into
// [0.5, 1). Powers of two keep the scaling exact.
double row_scale_factor(const Row& row) {
  double biggest = 0.0;
  for (const auto& e : row.entries) biggest = std::max(biggest, std::abs(e.value));
  if (biggest == 0.0 || !std::isfinite(biggest)) return 1.0;
  int exponent = 0;
  std::frexp(biggest, &exponent);
  return std::ldexp(1.0, -exponent);
}

struct Eta {
  int row = 0;
  double pivot = 1.0;  // alpha_r of the entering column
  std::vector<int> index;
  std::vector<double> value;  // alpha_i for i != row
};

}  // namespace

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration-limit";
  }
  return "unknown";
}

Bounds::Bounds(const LpModel& model) {
  lower_.reserve(model.num_columns());
  upper_.reserve(model.num_columns());
  for (const auto& c : model.columns()) {
    lower_.push_back(c.lower);
    upper_.push_back(c.upper);
  }
}

void Bounds::set(int column, double lower, double upper) {
  if (column < 0 || column >= size())
    throw std::invalid_argument("bounds: column index out of range");
  if (!(lower <= upper))
    throw std::invalid_argument("bounds: lower bound exceeds upper bound");
  lower_[column] = lower;
  upper_[column] = upper;
}

double max_scaled_row_violation(const LpModel& model, std::span<const double> x) {
  double worst = 0.0;
  for (int i = 0; i < model.num_rows(); ++i) {
    const Row& row = model.rows()[i];
    const double scale = row_scale_factor(row);
    const double act = model.row_activity(i, x) * scale;
    const double rhs = row.rhs * scale;
    double v = 0.0;
    switch (row.sense) {
      case RowSense::kLessEqual: v = act - rhs; break;
      case RowSense::kGreaterEqual: v = rhs - act; break;
      case RowSense::kEqual: v = std::abs(act - rhs); break;
    }
    worst = std::max(worst, v);
  }
  return worst;
}

class SimplexSolver::Impl {
 public:
  Impl(const LpModel& model, SimplexOptions options)
      : model_(model), opt_(options) {
    m_ = model.num_rows();
    n_ = model.num_columns();
    total_ = n_ + m_;

    row_scale_.resize(m_);
    scaled_rhs_.resize(m_);
    std::vector<int> count(n_, 0);
    for (int i = 0; i < m_; ++i) {
      const Row& row = model.rows()[i];
      row_scale_[i] = row_scale_factor(row);
      scaled_rhs_[i] = row.rhs * row_scale_[i];
      for (const auto& e : row.entries) ++count[e.column];
    }
    col_start_.assign(n_ + 1, 0);
    for (int j = 0; j < n_; ++j) col_start_[j + 1] = col_start_[j] + count[j];
    row_index_.resize(col_start_[n_]);
    value_.resize(col_start_[n_]);
    std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
    for (int i = 0; i < m_; ++i) {
      for (const auto& e : model.rows()[i].entries) {
        const int p = fill[e.column]++;
        row_index_[p] = i;
        value_[p] = e.value * row_scale_[i];
      }
    }

    const double sign = model.sense == ObjectiveSense::kMaximize ? -1.0 : 1.0;
    cost_.assign(total_, 0.0);
    for (int j = 0; j < n_; ++j) cost_[j] = sign * model.columns()[j].objective;

    lo_.resize(total_);
    up_.resize(total_);
    for (int i = 0; i < m_; ++i) {
      switch (model.rows()[i].sense) {
        case RowSense::kLessEqual:
          lo_[n_ + i] = 0.0;
          up_[n_ + i] = kInf;
          break;
        case RowSense::kEqual:
          lo_[n_ + i] = 0.0;
          up_[n_ + i] = 0.0;
          break;
        case RowSense::kGreaterEqual:
          lo_[n_ + i] = -kInf;
          up_[n_ + i] = 0.0;
          break;
      }
    }

    iteration_limit_ = opt_.iteration_limit > 0
                           ? opt_.iteration_limit
                           : 10000 + 50L * (static_cast<long>(m_) + n_);
  }

  const LpModel& model() const { return model_; }
  const SimplexOptions& options() const { return opt_; }

  LpSolution solve(const Bounds& bounds) {
    load_bounds(bounds);
    crash_basis();
    return run();
  }

  LpSolution resolve(const LpSolution& previous, const Bounds& bounds) {
    load_bounds(bounds);
    const Basis& b = previous.basis;
    if (static_cast<int>(b.basic.size()) != m_ ||
        static_cast<int>(b.status.size()) != total_) {
      crash_basis();
      return run();
    }
    basic_ = b.basic;
    status_ = b.status;
    x_.assign(total_, 0.0);
    for (int j = 0; j < total_; ++j) {
      if (status_[j] != VarStatus::kBasic) place_nonbasic(j, status_[j]);
    }
    return run();
  }

 private:
  // ---- setup ---------------------------------------------------------------

  void load_bounds(const Bounds& bounds) {
    if (bounds.size() != n_)
      throw std::invalid_argument("bounds do not match the model");
    for (int j = 0; j < n_; ++j) {
      lo_[j] = bounds.lower(j);
      up_[j] = bounds.upper(j);
    }
  }

  // Puts a nonbasic variable on a bound, honouring the requested side when
  // that bound exists.
  void place_nonbasic(int j, VarStatus wanted) {
    const bool has_lo = std::isfinite(lo_[j]);
    const bool has_up = std::isfinite(up_[j]);
    if (wanted == VarStatus::kAtUpper && has_up) {
      status_[j] = VarStatus::kAtUpper;
      x_[j] = up_[j];
    } else if (has_lo) {
      status_[j] = VarStatus::kAtLower;
      x_[j] = lo_[j];
    } else if (has_up) {
      status_[j] = VarStatus::kAtUpper;
      x_[j] = up_[j];
    } else {
      status_[j] = VarStatus::kFree;
      x_[j] = 0.0;
    }
  }

  // All-logical basis, except that each equality row takes the first
  // non-fixed structural column that appears in that row only.
  void crash_basis() {
    basic_.resize(m_);
    status_.assign(total_, VarStatus::kAtLower);
    x_.assign(total_, 0.0);
    for (int i = 0; i < m_; ++i) basic_[i] = n_ + i;
    std::vector<char> taken(m_, 0);
    for (int j = 0; j < n_; ++j) {
      if (col_start_[j + 1] - col_start_[j] != 1) continue;
      const int i = row_index_[col_start_[j]];
      if (taken[i] || model_.rows()[i].sense != RowSense::kEqual) continue;
      if (!(lo_[j] < up_[j])) continue;
      taken[i] = 1;
      basic_[i] = j;
    }
    for (int j = 0; j < total_; ++j) status_[j] = VarStatus::kAtLower;
    for (int p = 0; p < m_; ++p) status_[basic_[p]] = VarStatus::kBasic;
    for (int j = 0; j < total_; ++j)
      if (status_[j] != VarStatus::kBasic) place_nonbasic(j, VarStatus::kAtLower);
  }

  // ---- linear algebra --------------------------------------------------------

  bool factorize() {
    etas_.clear();
    if (m_ == 0) return true;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(m_) * 2);
    for (int p = 0; p < m_; ++p) {
      const int j = basic_[p];
      if (j >= n_) {
        trip.emplace_back(j - n_, p, 1.0);
      } else {
        for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
          trip.emplace_back(row_index_[k], p, value_[k]);
      }
    }
    Eigen::SparseMatrix<double> b(m_, m_);
    b.setFromTriplets(trip.begin(), trip.end());
    b.makeCompressed();
    lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    lu_->analyzePattern(b);
    lu_->factorize(b);
    return lu_->info() == Eigen::Success;
  }

  void ftran(Eigen::VectorXd& v) const {
    if (m_ == 0) return;
    v = lu_->solve(v).eval();
    for (const auto& eta : etas_) {
      const double t = v[eta.row];
      if (t == 0.0) continue;
      const double scaled = t / eta.pivot;
      v[eta.row] = scaled;
      for (std::size_t k = 0; k < eta.index.size(); ++k)
        v[eta.index[k]] -= eta.value[k] * scaled;
    }
  }

  void btran(Eigen::VectorXd& v) const {
    if (m_ == 0) return;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = v[it->row];
      for (std::size_t k = 0; k < it->index.size(); ++k)
        s -= it->value[k] * v[it->index[k]];
      v[it->row] = s / it->pivot;
    }
    v = lu_->transpose().solve(v).eval();
  }

  void column_of(int j, Eigen::VectorXd& out) const {
    out.setZero(m_);
    if (j >= n_) {
      out[j - n_] = 1.0;
      return;
    }
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
      out[row_index_[k]] = value_[k];
  }

  double dot_column(int j, const Eigen::VectorXd& y) const {
    if (j >= n_) return y[j - n_];
    double s = 0.0;
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
      s += value_[k] * y[row_index_[k]];
    return s;
  }

  void compute_basic_values() {
    Eigen::VectorXd rhs(m_);
    for (int i = 0; i < m_; ++i) rhs[i] = scaled_rhs_[i];
    for (int j = 0; j < total_; ++j) {
      if (status_[j] == VarStatus::kBasic || x_[j] == 0.0) continue;
      if (j >= n_) {
        rhs[j - n_] -= x_[j];
      } else {
        for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
          rhs[row_index_[k]] -= value_[k] * x_[j];
      }
    }
    ftran(rhs);
    for (int p = 0; p < m_; ++p) x_[basic_[p]] = rhs[p];
  }

  // Falls back to the all-logical basis when the current one is singular.
  void refactor() {
    if (!factorize()) {
      for (int j = 0; j < total_; ++j)
        if (status_[j] == VarStatus::kBasic) place_nonbasic(j, VarStatus::kAtLower);
      for (int i = 0; i < m_; ++i) {
        basic_[i] = n_ + i;
        status_[n_ + i] = VarStatus::kBasic;
      }
      if (!factorize()) throw std::runtime_error("simplex: cannot factorize slack basis");
    }
    compute_basic_values();
  }

  // ---- iterations ------------------------------------------------------------

  // Negative if below lower, positive if above upper, zero when feasible.
  double infeasibility(int j) const {
    if (x_[j] < lo_[j] - opt_.feasibility_tol) return x_[j] - lo_[j];
    if (x_[j] > up_[j] + opt_.feasibility_tol) return x_[j] - up_[j];
    return 0.0;
  }

  bool primal_feasible() const {
    for (int p = 0; p < m_; ++p)
      if (infeasibility(basic_[p]) != 0.0) return false;
    return true;
  }

  enum class Step { kContinue, kOptimal, kInfeasible, kUnbounded };

  Step iterate(bool phase1) {
    // Pricing vector.
    Eigen::VectorXd y(m_);
    for (int p = 0; p < m_; ++p) {
      const int j = basic_[p];
      if (phase1) {
        const double inf = infeasibility(j);
        y[p] = inf < 0.0 ? -1.0 : (inf > 0.0 ? 1.0 : 0.0);
      } else {
        y[p] = cost_[j];
      }
    }
    btran(y);

    int entering = -1;
    double best = 0.0;
    int direction = 0;
    for (int j = 0; j < total_; ++j) {
      const VarStatus st = status_[j];
      if (st == VarStatus::kBasic || lo_[j] == up_[j]) continue;
      const double d = (phase1 ? 0.0 : cost_[j]) - dot_column(j, y);
      int dir = 0;
      if (d < -opt_.optimality_tol &&
          (st == VarStatus::kAtLower || st == VarStatus::kFree)) {
        dir = 1;
      } else if (d > opt_.optimality_tol &&
                 (st == VarStatus::kAtUpper || st == VarStatus::kFree)) {
        dir = -1;
      }
      if (dir == 0) continue;
      if (bland_) {
        entering = j;
        direction = dir;
        break;
      }
      if (std::abs(d) > best) {
        best = std::abs(d);
        entering = j;
        direction = dir;
      }
    }
    if (entering < 0) return phase1 ? Step::kInfeasible : Step::kOptimal;

    Eigen::VectorXd alpha(m_);
    column_of(entering, alpha);
    ftran(alpha);

    // Harris two-pass ratio test. rate is dx_basic / dtheta.
    const double ftol = opt_.feasibility_tol;
    double theta_max = kInf;
    // to_upper reports which bound the basic variable runs into.
    auto limits = [&](int p, double& exact, double& relaxed, bool& to_upper) {
      exact = relaxed = kInf;
      to_upper = false;
      const double a = alpha[p];
      if (std::abs(a) <= opt_.pivot_tol) return;
      const double rate = -direction * a;
      const int j = basic_[p];
      const double inf = phase1 ? infeasibility(j) : 0.0;
      if (inf < 0.0) {
        if (rate > 0.0) exact = relaxed = (lo_[j] - x_[j]) / rate;
      } else if (inf > 0.0) {
        if (rate < 0.0) exact = relaxed = (x_[j] - up_[j]) / -rate;
        to_upper = true;
      } else if (rate < 0.0) {
        if (std::isfinite(lo_[j])) {
          exact = std::max(0.0, (x_[j] - lo_[j]) / -rate);
          relaxed = (x_[j] - lo_[j] + ftol) / -rate;
        }
      } else if (std::isfinite(up_[j])) {
        exact = std::max(0.0, (up_[j] - x_[j]) / rate);
        relaxed = (up_[j] - x_[j] + ftol) / rate;
        to_upper = true;
      }
    };

    int leave = -1;
    double theta = kInf;
    bool leave_to_upper = false;
    double exact, relaxed;
    bool to_upper;
    if (bland_) {
      for (int p = 0; p < m_; ++p) {
        limits(p, exact, relaxed, to_upper);
        if (exact == kInf) continue;
        if (leave < 0 || exact < theta - 1e-12 ||
            (exact <= theta + 1e-12 && basic_[p] < basic_[leave])) {
          leave = p;
          theta = exact;
          leave_to_upper = to_upper;
        }
      }
    } else {
      for (int p = 0; p < m_; ++p) {
        limits(p, exact, relaxed, to_upper);
        theta_max = std::min(theta_max, relaxed);
      }
      double best_pivot = 0.0;
      for (int p = 0; p < m_; ++p) {
        limits(p, exact, relaxed, to_upper);
        if (exact == kInf || exact > theta_max) continue;
        if (std::abs(alpha[p]) > best_pivot) {
          best_pivot = std::abs(alpha[p]);
          leave = p;
          theta = exact;
          leave_to_upper = to_upper;
        }
      }
    }

    const double range = up_[entering] - lo_[entering];
    const bool flip = std::isfinite(range) && range <= theta;
    if (!flip && leave < 0) {
      if (phase1) throw std::logic_error("simplex: unbounded phase-1 ray");
      return Step::kUnbounded;
    }
    const double step = flip ? range : theta;

    degenerate_ = step < 1e-12 ? degenerate_ + 1 : 0;
    bland_ = degenerate_ >= opt_.bland_after;

    if (step != 0.0) {
      for (int p = 0; p < m_; ++p) {
        if (alpha[p] != 0.0) x_[basic_[p]] -= direction * step * alpha[p];
      }
      x_[entering] += direction * step;
    }

    if (flip) {
      status_[entering] =
          direction > 0 ? VarStatus::kAtUpper : VarStatus::kAtLower;
      x_[entering] = direction > 0 ? up_[entering] : lo_[entering];
      return Step::kContinue;
    }

    const int leaving = basic_[leave];
    if (leave_to_upper) {
      status_[leaving] = VarStatus::kAtUpper;
      x_[leaving] = up_[leaving];
    } else {
      status_[leaving] = VarStatus::kAtLower;
      x_[leaving] = lo_[leaving];
    }
    if (lo_[leaving] == up_[leaving]) status_[leaving] = VarStatus::kAtLower;

    Eta eta;
    eta.row = leave;
    eta.pivot = alpha[leave];
    for (int p = 0; p < m_; ++p) {
      if (p != leave && std::abs(alpha[p]) > 1e-14) {
        eta.index.push_back(p);
        eta.value.push_back(alpha[p]);
      }
    }
    etas_.push_back(std::move(eta));
    basic_[leave] = entering;
    status_[entering] = VarStatus::kBasic;
    return Step::kContinue;
  }

  LpSolution run() {
    LpSolution sol;
    degenerate_ = 0;
    bland_ = false;
    refactor();

    long iterations = 0;
    LpStatus status = LpStatus::kIterationLimit;
    int verify_rounds = 0;
    bool done = false;
    while (!done) {
      if (iterations >= iteration_limit_) break;
      if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) refactor();
      const bool phase1 = !primal_feasible();
      const Step step = iterate(phase1);
      ++iterations;
      if (step == Step::kContinue) continue;
      // Confirm the verdict on a fresh factorization before accepting it.
      refactor();
      const bool still_phase1 = !primal_feasible();
      if (still_phase1 != phase1 && verify_rounds++ < 5) continue;
      switch (step) {
        case Step::kOptimal: status = LpStatus::kOptimal; break;
        case Step::kInfeasible: status = LpStatus::kInfeasible; break;
        case Step::kUnbounded: status = LpStatus::kUnbounded; break;
        case Step::kContinue: break;
      }
      done = true;
    }

    sol.status = status;
    sol.iterations = iterations;
    sol.basis.basic = basic_;
    sol.basis.status = status_;
    sol.primal.assign(x_.begin(), x_.begin() + n_);
    fill_duals(sol);
    sol.objective = model_.objective_value(sol.primal);
    return sol;
  }

  void fill_duals(LpSolution& sol) const {
    Eigen::VectorXd y(m_);
    for (int p = 0; p < m_; ++p) y[p] = cost_[basic_[p]];
    btran(y);
    const double sign = model_.sense == ObjectiveSense::kMaximize ? -1.0 : 1.0;
    sol.duals.resize(m_);
    for (int i = 0; i < m_; ++i) sol.duals[i] = sign * y[i] * row_scale_[i];
    sol.reduced_costs.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) {
      if (status_[j] == VarStatus::kBasic) continue;
      double d = model_.columns()[j].objective;
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
        d -= sol.duals[row_index_[k]] * value_[k] / row_scale_[row_index_[k]];
      sol.reduced_costs[j] = d;
    }
  }

  const LpModel& model_;
  SimplexOptions opt_;
  int m_ = 0;
  int n_ = 0;
  int total_ = 0;
  long iteration_limit_ = 0;

  std::vector<int> col_start_;
  std::vector<int> row_index_;
  std::vector<double> value_;
  std::vector<double> row_scale_;
  std::vector<double> scaled_rhs_;
  std::vector<double> cost_;
  std::vector<double> lo_;
  std::vector<double> up_;

  std::vector<int> basic_;
  std::vector<VarStatus> status_;
  std::vector<double> x_;

  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
  std::vector<Eta> etas_;
  int degenerate_ = 0;
  bool bland_ = false;
};

SimplexSolver::SimplexSolver(const LpModel& model, SimplexOptions options)
    : impl_(std::make_unique<Impl>(model, options)) {}
SimplexSolver::~SimplexSolver() = default;
SimplexSolver::SimplexSolver(SimplexSolver&&) noexcept = default;
SimplexSolver& SimplexSolver::operator=(SimplexSolver&&) noexcept = default;

LpSolution SimplexSolver::solve(const Bounds& bounds) { return impl_->solve(bounds); }
LpSolution SimplexSolver::resolve(const LpSolution& previous, const Bounds& bounds) {
  return impl_->resolve(previous, bounds);
}
const LpModel& SimplexSolver::model() const { return impl_->model(); }
const SimplexOptions& SimplexSolver::options() const { return impl_->options(); }

LpSolution solve_lp(const LpModel& model, const Bounds& bounds,
                    const SimplexOptions& options) {
  SimplexSolver solver(model, options);
  return solver.solve(bounds);
}

LpSolution resolve(const LpModel& model, const LpSolution& previous,
                   const Bounds& bounds, const SimplexOptions& options) {
  SimplexSolver solver(model, options);
  return solver.resolve(previous, bounds);
}

}  // namespace bidopt
