#include "bidopt/instance.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "bidopt/errors.hpp"

namespace bidopt {

namespace {

bool is_valid_name(const std::string& s) {
  if (s.empty()) return false;
  return std::none_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isspace(c) || !std::isprint(c);
  });
}

bool nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

const Business* Instance::find_business(const std::string& id) const {
  for (const auto& b : businesses)
    if (b.id == id) return &b;
  return nullptr;
}

const Campaign* Instance::find_campaign(const std::string& id) const {
  for (const auto& c : campaigns)
    if (c.id == id) return &c;
  return nullptr;
}

std::vector<std::string> validate_instance(const Instance& instance) {
  std::vector<std::string> out;
  auto fail = [&out](std::string msg) { out.push_back(std::move(msg)); };

  if (!nonneg(instance.impression_budget))
    fail("instance: impression budget V must be >= 0 (got " +
         fmt(instance.impression_budget) + ")");

  std::map<std::string, const Business*> business_by_id;
  for (const auto& b : instance.businesses) {
    if (!is_valid_name(b.id))
      fail("business '" + b.id + "': id must be non-empty without whitespace");
    if (!business_by_id.emplace(b.id, &b).second)
      fail("business " + b.id + ": duplicate id");
    if (!nonneg(b.budget))
      fail("business " + b.id + ": budget B_k must be >= 0 (got " +
           fmt(b.budget) + ")");
    if (!nonneg(b.cpc))
      fail("business " + b.id + ": cost per click CPC_k must be >= 0 (got " +
           fmt(b.cpc) + ")");
  }

  std::map<std::string, const Campaign*> campaign_by_id;
  for (const auto& c : instance.campaigns) {
    const std::string who = "campaign " + c.id;
    if (!is_valid_name(c.id))
      fail("campaign '" + c.id + "': id must be non-empty without whitespace");
    if (!campaign_by_id.emplace(c.id, &c).second) fail(who + ": duplicate id");
    if (!business_by_id.count(c.business_id))
      fail(who + ": unknown business '" + c.business_id + "'");
    if (!(std::isfinite(c.ctr) && c.ctr >= 0.0 && c.ctr <= 1.0))
      fail(who + ": click-through rate must lie in [0,1] (got " + fmt(c.ctr) +
           ")");
    if (c.levels.empty()) {
      fail(who + ": must have at least the slack level");
      continue;
    }
    for (std::size_t j = 0; j < c.levels.size(); ++j) {
      const auto& lv = c.levels[j];
      const std::string where = who + " level " + std::to_string(j);
      if (lv.level_index != static_cast<int>(j))
        fail(where + ": level indices must be consecutive from 0 (got " +
             std::to_string(lv.level_index) + ")");
      if (!nonneg(lv.ret) || !nonneg(lv.ad_value) || !nonneg(lv.impressions))
        fail(where + ": return, ad value and impressions must be >= 0");
    }
    const auto& slack = c.levels.front();
    if (slack.ret != 0.0 || slack.ad_value != 0.0 || slack.impressions != 0.0)
      fail(who + ": slack level must be all-zero");
  }

  // Every campaign must be listed by exactly its owning business.
  std::map<std::string, int> listed;
  for (const auto& b : instance.businesses) {
    for (const auto& cid : b.campaign_ids) {
      ++listed[cid];
      auto it = campaign_by_id.find(cid);
      if (it == campaign_by_id.end()) {
        fail("business " + b.id + ": lists unknown campaign '" + cid + "'");
      } else if (it->second->business_id != b.id) {
        fail("business " + b.id + ": lists campaign " + cid +
             " owned by business '" + it->second->business_id + "'");
      }
    }
  }
  for (const auto& c : instance.campaigns) {
    const int n = listed.count(c.id) ? listed[c.id] : 0;
    if (n == 0 && business_by_id.count(c.business_id))
      fail("campaign " + c.id + ": not listed by business " + c.business_id);
    else if (n > 1)
      fail("campaign " + c.id + ": listed " + std::to_string(n) + " times");
  }
  return out;
}

std::vector<Instance> decompose_by_business(const Instance& instance) {
  std::vector<Instance> out;
  out.reserve(instance.businesses.size());
  for (const auto& b : instance.businesses) {
    Instance sub;
    sub.impression_budget = instance.impression_budget;
    sub.businesses.push_back(b);
    for (const auto& c : instance.campaigns)
      if (c.business_id == b.id) sub.campaigns.push_back(c);
    out.push_back(std::move(sub));
  }
  return out;
}

namespace {

template <typename T>
T require(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key))
    throw InputError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(where + ": field '" + key + "': " + e.what());
  }
}

}  // namespace

Instance instance_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("instance: expected a JSON object");
  Instance inst;
  inst.impression_budget = require<double>(j, "impression_budget", "instance");

  if (!j.contains("businesses") || !j["businesses"].is_array())
    throw InputError("instance: 'businesses' must be an array");
  if (!j.contains("campaigns") || !j["campaigns"].is_array())
    throw InputError("instance: 'campaigns' must be an array");

  for (const auto& jc : j["campaigns"]) {
    Campaign c;
    c.id = require<std::string>(jc, "id", "campaign");
    const std::string where = "campaign " + c.id;
    c.business_id = require<std::string>(jc, "business", where);
    c.ctr = require<double>(jc, "ctr", where);
    if (!jc.contains("levels") || !jc["levels"].is_array())
      throw InputError(where + ": 'levels' must be an array");
    int pos = 0;
    for (const auto& jl : jc["levels"]) {
      const std::string lw = where + " level " + std::to_string(pos);
      BidLevel lv;
      lv.level_index = jl.contains("level") ? require<int>(jl, "level", lw) : pos;
      lv.ret = require<double>(jl, "return", lw);
      lv.ad_value = require<double>(jl, "ad_value", lw);
      lv.impressions = require<double>(jl, "impressions", lw);
      if (jl.contains("bid") && !jl["bid"].is_null())
        lv.bid = require<double>(jl, "bid", lw);
      c.levels.push_back(lv);
      ++pos;
    }
    inst.campaigns.push_back(std::move(c));
  }

  for (const auto& jb : j["businesses"]) {
    Business b;
    b.id = require<std::string>(jb, "id", "business");
    const std::string where = "business " + b.id;
    b.budget = require<double>(jb, "budget", where);
    b.cpc = require<double>(jb, "cpc", where);
    if (jb.contains("campaigns")) {
      b.campaign_ids = require<std::vector<std::string>>(jb, "campaigns", where);
    } else {
      for (const auto& c : inst.campaigns)
        if (c.business_id == b.id) b.campaign_ids.push_back(c.id);
    }
    inst.businesses.push_back(std::move(b));
  }
  return inst;
}

nlohmann::json instance_to_json(const Instance& instance) {
  nlohmann::json j;
  j["impression_budget"] = instance.impression_budget;
  j["businesses"] = nlohmann::json::array();
  for (const auto& b : instance.businesses) {
    j["businesses"].push_back({{"id", b.id},
                               {"budget", b.budget},
                               {"cpc", b.cpc},
                               {"campaigns", b.campaign_ids}});
  }
  j["campaigns"] = nlohmann::json::array();
  for (const auto& c : instance.campaigns) {
    nlohmann::json levels = nlohmann::json::array();
    for (const auto& lv : c.levels) {
      nlohmann::json jl = {{"level", lv.level_index},
                           {"return", lv.ret},
                           {"ad_value", lv.ad_value},
                           {"impressions", lv.impressions}};
      if (lv.bid) jl["bid"] = *lv.bid;
      levels.push_back(std::move(jl));
    }
    j["campaigns"].push_back({{"id", c.id},
                              {"business", c.business_id},
                              {"ctr", c.ctr},
                              {"levels", std::move(levels)}});
  }
  return j;
}

Instance read_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open instance file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
  return instance_from_json(j);
}

void write_instance_file(const Instance& instance, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write instance file '" + path + "'");
  out << instance_to_json(instance).dump(1) << '\n';
}

}  // namespace bidopt
