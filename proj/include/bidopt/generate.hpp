#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bidopt/instance.hpp"

namespace bidopt {

enum class CurveShape { kUniform, kFrontLoaded, kBackLoaded };

std::string to_string(CurveShape s);
CurveShape curve_shape_from_string(const std::string& s);

struct CountRange {
  int min = 1;
  int max = 1;
};

struct GenParams {
  int businesses = 1;
  CountRange campaigns_per_business{1, 1};
  // Total levels per campaign, the do-nothing slack included.
  CountRange levels_per_campaign{3, 3};
  // B_k as a multiple of the spend of the business's max-return portfolio.
  double budget_tightness = 1.0;
  // V as a multiple of the impressions of the max-return portfolio.
  double impression_tightness = 1.0;
  // CPC_k = click_margin * max_i(top AV_i / CTR_i). Margins >= 1 keep every
  // click-value row slack for any level choice.
  double click_margin = 1.0;
  CurveShape curve_shape = CurveShape::kUniform;
  std::uint64_t seed = 1;
};

// Returns one line per problem; empty when the parameters are usable.
std::vector<std::string> validate_params(const GenParams& params);

// Deterministic in (params, seed). Throws InputError on invalid parameters.
Instance generate_instance(const GenParams& params);

// One instance per requested total campaign count. Campaigns are spread as
// evenly as possible over base.businesses; instance t uses seed base.seed + t.
std::vector<Instance> scale_suite(const GenParams& base,
                                  const std::vector<int>& sos_counts);

// Same construction as scale_suite for a single count.
Instance generate_with_campaign_count(const GenParams& base, int total_campaigns);

}  // namespace bidopt
