#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace bidopt {

// One bid level of a campaign. Level 0 is the "do nothing" slack and carries
// all-zero data.
struct BidLevel {
  int level_index = 0;
  double ret = 0.0;          // expected gross return L_ij
  double ad_value = 0.0;     // expected budget decrement per impression AV_ij
  double impressions = 0.0;  // expected impressions P_ij
  std::optional<double> bid; // pass-through metadata, not used by the model

  double spend() const { return impressions * ad_value; }

  bool operator==(const BidLevel&) const = default;
};

struct Campaign {
  std::string id;
  std::string business_id;
  double ctr = 0.0;
  std::vector<BidLevel> levels;

  bool operator==(const Campaign&) const = default;
};

struct Business {
  std::string id;
  double budget = 0.0;
  double cpc = 0.0;
  std::vector<std::string> campaign_ids;

  bool operator==(const Business&) const = default;
};

struct Instance {
  std::vector<Business> businesses;
  std::vector<Campaign> campaigns;
  double impression_budget = 0.0;

  const Business* find_business(const std::string& id) const;
  const Campaign* find_campaign(const std::string& id) const;

  bool operator==(const Instance&) const = default;
};

// Returns one human-readable line per broken invariant; empty means valid.
std::vector<std::string> validate_instance(const Instance& instance);

// Splits the instance into one sub-instance per business. Every sub-instance
// keeps the full impression budget; whether the split is exact depends on the
// impression row being slack, which the caller has to decide.
std::vector<Instance> decompose_by_business(const Instance& instance);

// JSON instance schema. See README for the field-by-field description.
Instance instance_from_json(const nlohmann::json& j);
nlohmann::json instance_to_json(const Instance& instance);

Instance read_instance_file(const std::string& path);
void write_instance_file(const Instance& instance, const std::string& path);

}  // namespace bidopt
