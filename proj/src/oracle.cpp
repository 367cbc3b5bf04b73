#include "bidopt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>

namespace bidopt {

namespace {

// Per-business and global accumulators in the form the constraints are
// written: spend vs budget, spend vs CPC * expected clicks, impressions vs V.
struct Totals {
  std::vector<double> spend;
  std::vector<double> clicks;  // sum of CTR * P
  double impressions = 0.0;
  double ret = 0.0;
};

struct Layout {
  std::vector<int> business_of;  // campaign -> business position
};

Layout make_layout(const Instance& inst) {
  std::map<std::string, int> pos;
  for (std::size_t k = 0; k < inst.businesses.size(); ++k)
    pos[inst.businesses[k].id] = static_cast<int>(k);
  Layout layout;
  for (const auto& c : inst.campaigns) layout.business_of.push_back(pos.at(c.business_id));
  return layout;
}

bool within(double lhs, double rhs, double scale, double tol) {
  return lhs <= rhs + tol * std::max({1.0, std::abs(rhs), scale});
}

bool totals_feasible(const Instance& inst, const Totals& t, double tol) {
  for (std::size_t k = 0; k < inst.businesses.size(); ++k) {
    const auto& b = inst.businesses[k];
    if (!within(t.spend[k], b.budget, t.spend[k], tol)) return false;
    const double click_value = b.cpc * t.clicks[k];
    if (!within(t.spend[k], click_value, std::max(t.spend[k], click_value), tol))
      return false;
  }
  return within(t.impressions, inst.impression_budget, t.impressions, tol);
}

void check_cap(std::uint64_t count, std::uint64_t cap) {
  if (count > cap)
    throw std::length_error("oracle: " + std::to_string(count) +
                            " patterns exceed the enumeration cap of " +
                            std::to_string(cap));
}

constexpr double kPhaseOneTol = 1e-9;

// Dense two-phase tableau simplex with Bland's rule for
//   max c't  s.t.  G t <= h,  0 <= t <= 1.
// Tiny problems only.
class SmallLp {
 public:
  SmallLp(const std::vector<double>& c, const std::vector<std::vector<double>>& g,
          const std::vector<double>& h) {
    n_ = static_cast<int>(c.size());
    const int rows = static_cast<int>(g.size()) + n_;
    // Columns: t (n), slack per row (rows), artificial per row (rows), rhs.
    width_ = n_ + 2 * rows + 1;
    tab_.assign(rows + 1, std::vector<double>(width_, 0.0));
    basis_.resize(rows);
    for (int r = 0; r < rows; ++r) {
      std::vector<double> coef(n_, 0.0);
      double rhs;
      if (r < static_cast<int>(g.size())) {
        coef = g[r];
        rhs = h[r];
      } else {
        coef[r - g.size()] = 1.0;
        rhs = 1.0;
      }
      const double sign = rhs < 0.0 ? -1.0 : 1.0;
      for (int j = 0; j < n_; ++j) tab_[r][j] = sign * coef[j];
      tab_[r][n_ + r] = sign;
      tab_[r][width_ - 1] = sign * rhs;
      if (sign < 0.0) {
        tab_[r][n_ + rows + r] = 1.0;
        basis_[r] = n_ + rows + r;
      } else {
        basis_[r] = n_ + r;
      }
    }
    rows_ = rows;
    c_ = c;
  }

  std::optional<std::pair<double, std::vector<double>>> solve() {
    const int art_begin = n_ + rows_;
    // Phase 1: maximize -sum(artificials).
    auto& obj = tab_[rows_];
    std::fill(obj.begin(), obj.end(), 0.0);
    for (int r = 0; r < rows_; ++r) {
      if (basis_[r] < art_begin) continue;
      for (int j = 0; j < width_; ++j) obj[j] -= tab_[r][j];
      obj[basis_[r]] = 0.0;
    }
    run(width_ - 1);
    if (tab_[rows_][width_ - 1] < -kPhaseOneTol) return std::nullopt;
    for (int r = 0; r < rows_; ++r) {
      if (basis_[r] < art_begin) continue;
      for (int j = 0; j < art_begin; ++j) {
        if (std::abs(tab_[r][j]) > 1e-9) {
          pivot(r, j);
          break;
        }
      }
    }
    // Phase 2.
    std::fill(obj.begin(), obj.end(), 0.0);
    for (int j = 0; j < n_; ++j) obj[j] = -c_[j];
    for (int r = 0; r < rows_; ++r) {
      const int b = basis_[r];
      if (obj[b] == 0.0) continue;
      const double f = obj[b];
      for (int j = 0; j < width_; ++j) obj[j] -= f * tab_[r][j];
    }
    run(art_begin);
    std::vector<double> t(n_, 0.0);
    for (int r = 0; r < rows_; ++r)
      if (basis_[r] < n_) t[basis_[r]] = tab_[r][width_ - 1];
    double value = 0.0;
    for (int j = 0; j < n_; ++j) value += c_[j] * t[j];
    return std::make_pair(value, t);
  }

 private:
  // Entering candidates are columns [0, limit).
  void run(int limit) {
    for (int guard = 0; guard < 10000; ++guard) {
      int enter = -1;
      for (int j = 0; j < limit; ++j) {
        if (tab_[rows_][j] < -1e-12) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return;
      int leave = -1;
      double best = 0.0;
      for (int r = 0; r < rows_; ++r) {
        const double a = tab_[r][enter];
        if (a <= 1e-12) continue;
        const double ratio = tab_[r][width_ - 1] / a;
        if (leave < 0 || ratio < best - 1e-12 ||
            (ratio <= best + 1e-12 && basis_[r] < basis_[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave < 0) return;  // cannot happen: every t is boxed
      pivot(leave, enter);
    }
  }

  void pivot(int r, int col) {
    const double p = tab_[r][col];
    for (double& v : tab_[r]) v /= p;
    for (int i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      const double f = tab_[i][col];
      if (f == 0.0) continue;
      for (int j = 0; j < width_; ++j) tab_[i][j] -= f * tab_[r][j];
    }
    basis_[r] = col;
  }

  int n_ = 0;
  int rows_ = 0;
  int width_ = 0;
  std::vector<std::vector<double>> tab_;
  std::vector<int> basis_;
  std::vector<double> c_;
};

}  // namespace

Sos1OracleResult enumerate_sos1(const Instance& inst, const OracleOptions& options) {
  const std::size_t num = inst.campaigns.size();
  std::uint64_t count = 1;
  for (const auto& c : inst.campaigns) {
    count *= c.levels.size();
    check_cap(count, options.cap);
  }
  const Layout layout = make_layout(inst);
  const std::size_t nb = inst.businesses.size();

  // Accumulators per depth so that no value is ever subtracted back out.
  std::vector<Totals> stack(num + 1);
  stack[0].spend.assign(nb, 0.0);
  stack[0].clicks.assign(nb, 0.0);

  Sos1OracleResult best;
  bool have_best = false;
  std::vector<int> pick(num, 0);

  // Odometer over assignments in lexicographic order.
  std::size_t depth = 0;
  while (true) {
    while (depth < num) {
      const auto& c = inst.campaigns[depth];
      const auto& lv = c.levels[pick[depth]];
      Totals next = stack[depth];
      const int k = layout.business_of[depth];
      next.spend[k] += lv.impressions * lv.ad_value;
      next.clicks[k] += c.ctr * lv.impressions;
      next.impressions += lv.impressions;
      next.ret += lv.ret;
      stack[depth + 1] = std::move(next);
      ++depth;
    }
    const Totals& t = stack[num];
    if (totals_feasible(inst, t, options.tolerance) &&
        (!have_best || t.ret > best.objective)) {
      best.objective = t.ret;
      best.levels = pick;
      have_best = true;
    }
    // Advance.
    int i = static_cast<int>(num) - 1;
    while (i >= 0 &&
           pick[i] + 1 >= static_cast<int>(inst.campaigns[i].levels.size())) {
      pick[i] = 0;
      --i;
    }
    if (i < 0) break;
    ++pick[i];
    depth = static_cast<std::size_t>(i);
  }
  if (!have_best) {
    // Unreachable for valid instances: all-slack is always feasible.
    best.levels.assign(num, 0);
  }
  return best;
}

Sos2OracleResult enumerate_sos2(const Instance& inst, const OracleOptions& options) {
  const std::size_t num = inst.campaigns.size();
  std::vector<int> pairs(num);
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < num; ++i) {
    const int levels = static_cast<int>(inst.campaigns[i].levels.size());
    pairs[i] = std::max(1, levels - 1);
    count *= static_cast<std::uint64_t>(pairs[i]);
    check_cap(count, options.cap);
  }
  const Layout layout = make_layout(inst);
  const std::size_t nb = inst.businesses.size();

  Sos2OracleResult best;
  bool have_best = false;
  std::vector<int> pick(num, 0);
  while (true) {
    // Fixed part from the lower level of each pair, variable part t_i moves
    // weight onto the upper level.
    std::vector<double> spend0(nb, 0.0), clicks0(nb, 0.0);
    double imp0 = 0.0, ret0 = 0.0;
    std::vector<int> var_campaign;
    for (std::size_t i = 0; i < num; ++i) {
      const auto& c = inst.campaigns[i];
      const auto& lo = c.levels[pick[i]];
      const int k = layout.business_of[i];
      spend0[k] += lo.impressions * lo.ad_value;
      clicks0[k] += c.ctr * lo.impressions;
      imp0 += lo.impressions;
      ret0 += lo.ret;
      if (c.levels.size() > 1) var_campaign.push_back(static_cast<int>(i));
    }
    const std::size_t nv = var_campaign.size();
    std::vector<double> obj(nv);
    std::vector<std::vector<double>> g;
    std::vector<double> h;
    std::vector<double> budget_row(nv, 0.0);
    for (std::size_t k = 0; k < nb; ++k) {
      const auto& b = inst.businesses[k];
      std::vector<double> spend_row(nv, 0.0), click_row(nv, 0.0);
      for (std::size_t v = 0; v < nv; ++v) {
        const int i = var_campaign[v];
        if (layout.business_of[i] != static_cast<int>(k)) continue;
        const auto& c = inst.campaigns[i];
        const auto& lo = c.levels[pick[i]];
        const auto& hi = c.levels[pick[i] + 1];
        const double dspend = hi.impressions * hi.ad_value - lo.impressions * lo.ad_value;
        const double dclicks = c.ctr * (hi.impressions - lo.impressions);
        spend_row[v] = dspend;
        click_row[v] = dspend - b.cpc * dclicks;
      }
      g.push_back(spend_row);
      h.push_back(b.budget - spend0[k]);
      g.push_back(click_row);
      h.push_back(b.cpc * clicks0[k] - spend0[k]);
    }
    std::vector<double> imp_row(nv);
    for (std::size_t v = 0; v < nv; ++v) {
      const int i = var_campaign[v];
      const auto& c = inst.campaigns[i];
      imp_row[v] = c.levels[pick[i] + 1].impressions - c.levels[pick[i]].impressions;
      obj[v] = c.levels[pick[i] + 1].ret - c.levels[pick[i]].ret;
    }
    g.push_back(imp_row);
    h.push_back(inst.impression_budget - imp0);

    // Rounding that pushes a right-hand side slightly negative is absorbed
    // by the phase-1 tolerance.
    SmallLp lp(obj, g, h);
    if (auto res = lp.solve()) {
      const double value = ret0 + res->first;
      if (!have_best || value > best.objective) {
        have_best = true;
        best.objective = value;
        best.choices.assign(num, Sos2Choice{});
        for (std::size_t i = 0; i < num; ++i) best.choices[i].lower_level = pick[i];
        for (std::size_t v = 0; v < nv; ++v) {
          const double t = std::clamp(res->second[v], 0.0, 1.0);
          auto& ch = best.choices[var_campaign[v]];
          ch.lower_weight = 1.0 - t;
          ch.upper_weight = t;
        }
      }
    }

    int i = static_cast<int>(num) - 1;
    while (i >= 0 && pick[i] + 1 >= pairs[i]) {
      pick[i] = 0;
      --i;
    }
    if (i < 0) break;
    ++pick[i];
  }
  if (!have_best) best.choices.assign(num, Sos2Choice{});
  return best;
}

LevelValues values_from_sos1(const Instance& inst, const std::vector<int>& levels) {
  LevelValues v;
  for (std::size_t i = 0; i < inst.campaigns.size(); ++i) {
    v.emplace_back(inst.campaigns[i].levels.size(), 0.0);
    v.back()[levels[i]] = 1.0;
  }
  return v;
}

LevelValues values_from_sos2(const Instance& inst,
                             const std::vector<Sos2Choice>& choices) {
  LevelValues v;
  for (std::size_t i = 0; i < inst.campaigns.size(); ++i) {
    v.emplace_back(inst.campaigns[i].levels.size(), 0.0);
    const auto& ch = choices[i];
    v.back()[ch.lower_level] = ch.lower_weight;
    if (ch.upper_weight != 0.0) v.back()[ch.lower_level + 1] = ch.upper_weight;
  }
  return v;
}

FeasibilityCheck check_assignment(const Instance& inst, const LevelValues& values,
                                  int sos_type, double tol, double zero_tol) {
  FeasibilityCheck out;
  auto fail = [&out](std::string msg) {
    out.feasible = false;
    out.problems.push_back(std::move(msg));
  };
  if (values.size() != inst.campaigns.size()) {
    fail("value table has " + std::to_string(values.size()) + " campaigns, instance has " +
         std::to_string(inst.campaigns.size()));
    return out;
  }
  const Layout layout = make_layout(inst);
  const std::size_t nb = inst.businesses.size();
  std::vector<double> spend(nb, 0.0), clicks(nb, 0.0), spend_scale(nb, 0.0),
      click_scale(nb, 0.0);
  double impressions = 0.0, imp_scale = 0.0;

  for (std::size_t i = 0; i < inst.campaigns.size(); ++i) {
    const auto& c = inst.campaigns[i];
    const auto& row = values[i];
    if (row.size() != c.levels.size()) {
      fail("campaign " + c.id + ": wrong number of level values");
      continue;
    }
    double sum = 0.0;
    int nonzeros = 0, first = -1, last = -1;
    for (std::size_t j = 0; j < row.size(); ++j) {
      const double x = row[j];
      if (x < -tol || x > 1.0 + tol)
        fail("campaign " + c.id + " level " + std::to_string(j) + ": value out of [0,1]");
      if (x > zero_tol) {
        ++nonzeros;
        if (first < 0) first = static_cast<int>(j);
        last = static_cast<int>(j);
      }
      sum += x;
      const auto& lv = c.levels[j];
      const int k = layout.business_of[i];
      const double s = lv.impressions * lv.ad_value * x;
      spend[k] += s;
      spend_scale[k] = std::max(spend_scale[k], std::abs(s));
      const double cl = c.ctr * lv.impressions * x;
      clicks[k] += cl;
      click_scale[k] = std::max(click_scale[k], std::abs(cl));
      impressions += lv.impressions * x;
      imp_scale = std::max(imp_scale, std::abs(lv.impressions * x));
      out.objective += lv.ret * x;
    }
    if (std::abs(sum - 1.0) > tol)
      fail("campaign " + c.id + ": convexity row sums to " + std::to_string(sum));
    if (sos_type == 1 && nonzeros > 1)
      fail("campaign " + c.id + ": SOS1 set has " + std::to_string(nonzeros) + " nonzeros");
    if (sos_type == 2 && nonzeros > 0 && last - first > 1)
      fail("campaign " + c.id + ": SOS2 nonzeros are not adjacent");
  }
  for (std::size_t k = 0; k < nb; ++k) {
    const auto& b = inst.businesses[k];
    if (!within(spend[k], b.budget, spend_scale[k], tol))
      fail("business " + b.id + ": budget exceeded (" + std::to_string(spend[k]) + " > " +
           std::to_string(b.budget) + ")");
    const double click_value = b.cpc * clicks[k];
    if (!within(spend[k], click_value,
                std::max(spend_scale[k], b.cpc * click_scale[k]), tol))
      fail("business " + b.id + ": spend exceeds click value");
  }
  if (!within(impressions, inst.impression_budget, imp_scale, tol))
    fail("impression budget exceeded");
  return out;
}

}  // namespace bidopt
