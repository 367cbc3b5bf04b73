#include "bidopt/generate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "bidopt/errors.hpp"

namespace bidopt {

namespace {

// std::*_distribution output is implementation-defined, so draws are mapped
// from the raw engine output by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  int integer(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }

 private:
  std::mt19937_64 engine_;
};

double round_to(double v, double quantum) { return std::round(v / quantum) * quantum; }

double step_factor(CurveShape shape, int step) {
  switch (shape) {
    case CurveShape::kUniform: return 0.5;
    case CurveShape::kFrontLoaded: return 1.5 * std::pow(0.5, step);
    case CurveShape::kBackLoaded: return 0.25 * std::pow(2.0, step);
  }
  return 0.5;
}

Campaign make_campaign(Rng& rng, const GenParams& p, const std::string& id,
                       const std::string& business) {
  Campaign c;
  c.id = id;
  c.business_id = business;
  c.ctr = round_to(rng.uniform(0.01, 0.2), 1e-4);
  const int total_levels = rng.integer(p.levels_per_campaign.min, p.levels_per_campaign.max);
  c.levels.push_back(BidLevel{0, 0.0, 0.0, 0.0, std::nullopt});

  const double first_value = rng.log_uniform(0.05, 0.5);
  const double value_per_click = rng.log_uniform(0.5, 5.0);
  double ad_value = 0.0, impressions = 0.0, ret = 0.0, bid = 0.0;
  for (int j = 1; j < total_levels; ++j) {
    double av, imp;
    if (j == 1) {
      av = first_value;
      imp = rng.log_uniform(500.0, 5000.0);
    } else {
      av = ad_value + first_value * step_factor(p.curve_shape, j - 2) * rng.uniform(0.8, 1.2);
      imp = impressions * (1.0 + rng.uniform(0.15, 0.9));
    }
    av = std::max(round_to(av, 1e-4), ad_value + 1e-4);
    imp = std::max(std::round(imp), impressions + 1.0);
    double r = imp * c.ctr * value_per_click * rng.uniform(0.9, 1.1);
    r = std::max(round_to(r, 0.01), ret + 0.01);
    double b = std::max(round_to(av * 1.1, 1e-4), bid + 1e-4);
    c.levels.push_back(BidLevel{j, r, av, imp, b});
    ad_value = av;
    impressions = imp;
    ret = r;
    bid = b;
  }
  return c;
}

// Level with the largest return; the first one on ties.
const BidLevel& max_return_level(const Campaign& c) {
  const BidLevel* best = &c.levels.front();
  for (const auto& lv : c.levels)
    if (lv.ret > best->ret) best = &lv;
  return *best;
}

Instance generate_with_counts(const GenParams& p, const std::vector<int>& counts,
                              std::uint64_t seed) {
  Rng rng(seed);
  Instance inst;
  double top_impressions = 0.0;
  int next_campaign = 1;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    Business b;
    b.id = "k" + std::to_string(k + 1);
    double top_spend = 0.0;
    double cpc_floor = 0.0;
    for (int n = 0; n < counts[k]; ++n) {
      Campaign c = make_campaign(rng, p, "c" + std::to_string(next_campaign++), b.id);
      const BidLevel& top = max_return_level(c);
      top_spend += top.spend();
      top_impressions += top.impressions;
      cpc_floor = std::max(cpc_floor, c.levels.back().ad_value / c.ctr);
      b.campaign_ids.push_back(c.id);
      inst.campaigns.push_back(std::move(c));
    }
    b.budget = p.budget_tightness * top_spend;
    b.cpc = p.click_margin * cpc_floor;
    inst.businesses.push_back(std::move(b));
  }
  inst.impression_budget = p.impression_tightness * top_impressions;
  return inst;
}

}  // namespace

std::string to_string(CurveShape s) {
  switch (s) {
    case CurveShape::kUniform: return "uniform";
    case CurveShape::kFrontLoaded: return "front-loaded";
    case CurveShape::kBackLoaded: return "back-loaded";
  }
  return "uniform";
}

CurveShape curve_shape_from_string(const std::string& s) {
  if (s == "uniform") return CurveShape::kUniform;
  if (s == "front-loaded") return CurveShape::kFrontLoaded;
  if (s == "back-loaded") return CurveShape::kBackLoaded;
  throw InputError("unknown curve shape '" + s + "'");
}

std::vector<std::string> validate_params(const GenParams& p) {
  std::vector<std::string> out;
  if (p.businesses < 1) out.push_back("businesses must be >= 1");
  auto check_range = [&out](const CountRange& r, const char* what) {
    if (r.min < 1 || r.max < r.min)
      out.push_back(std::string(what) + " must satisfy 1 <= min <= max");
  };
  check_range(p.campaigns_per_business, "campaigns per business");
  check_range(p.levels_per_campaign, "levels per campaign");
  auto positive = [&out](double v, const char* what) {
    if (!(std::isfinite(v) && v > 0.0)) out.push_back(std::string(what) + " must be > 0");
  };
  positive(p.budget_tightness, "budget tightness");
  positive(p.impression_tightness, "impression tightness");
  positive(p.click_margin, "click margin");
  return out;
}

namespace {

void require_valid(const GenParams& p) {
  const auto problems = validate_params(p);
  if (!problems.empty()) throw InputError("invalid generator parameters: " + problems.front());
}

}  // namespace

Instance generate_instance(const GenParams& p) {
  require_valid(p);
  // Campaign counts come from their own stream so they do not shift the
  // curve draws.
  Rng count_rng(p.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<int> counts(p.businesses);
  for (int& n : counts)
    n = count_rng.integer(p.campaigns_per_business.min, p.campaigns_per_business.max);
  return generate_with_counts(p, counts, p.seed);
}

Instance generate_with_campaign_count(const GenParams& base, int total) {
  require_valid(base);
  if (total < base.businesses)
    throw InputError("need at least one campaign per business");
  std::vector<int> counts(base.businesses, total / base.businesses);
  for (int k = 0; k < total % base.businesses; ++k) ++counts[k];
  return generate_with_counts(base, counts, base.seed);
}

std::vector<Instance> scale_suite(const GenParams& base, const std::vector<int>& sos_counts) {
  std::vector<Instance> out;
  for (std::size_t t = 0; t < sos_counts.size(); ++t) {
    GenParams p = base;
    p.seed = base.seed + t;
    p.businesses = std::min(base.businesses, sos_counts[t]);
    out.push_back(generate_with_campaign_count(p, sos_counts[t]));
  }
  return out;
}

}  // namespace bidopt
