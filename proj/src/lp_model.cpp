#include "bidopt/lp_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "bidopt/errors.hpp"

namespace bidopt {

int LpModel::add_column(Column c) {
  const int idx = num_columns();
  column_index_.emplace(c.name, idx);
  columns_.push_back(std::move(c));
  return idx;
}

int LpModel::add_row(Row r) {
  const int idx = num_rows();
  row_index_.emplace(r.name, idx);
  rows_.push_back(std::move(r));
  return idx;
}

std::optional<int> LpModel::column_index(const std::string& name) const {
  auto it = column_index_.find(name);
  if (it == column_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> LpModel::row_index(const std::string& name) const {
  auto it = row_index_.find(name);
  if (it == row_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> LpModel::sos_index(const std::string& name) const {
  for (std::size_t s = 0; s < sos_sets_.size(); ++s)
    if (sos_sets_[s].name == name) return static_cast<int>(s);
  return std::nullopt;
}

double LpModel::row_activity(int row, std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& e : rows_[row].entries) sum += e.value * x[e.column];
  return sum;
}

double LpModel::objective_value(std::span<const double> x) const {
  double sum = 0.0;
  for (std::size_t j = 0; j < columns_.size(); ++j)
    sum += columns_[j].objective * x[j];
  return sum;
}

std::vector<std::string> LpModel::check() const {
  std::vector<std::string> out;
  if (column_index_.size() != columns_.size())
    out.push_back("duplicate column names");
  if (row_index_.size() != rows_.size()) out.push_back("duplicate row names");
  for (const auto& c : columns_) {
    if (std::isnan(c.lower) || std::isnan(c.upper) || c.lower > c.upper)
      out.push_back("column " + c.name + ": lower bound exceeds upper bound");
  }
  for (const auto& r : rows_) {
    for (const auto& e : r.entries) {
      if (e.column < 0 || e.column >= num_columns()) {
        out.push_back("row " + r.name + ": column index out of range");
        break;
      }
    }
  }
  std::vector<int> owner(columns_.size(), -1);
  for (std::size_t s = 0; s < sos_sets_.size(); ++s) {
    const auto& set = sos_sets_[s];
    if (set.type != 1 && set.type != 2)
      out.push_back("set " + set.name + ": type must be 1 or 2");
    if (set.members.size() != set.weights.size())
      out.push_back("set " + set.name + ": member/weight count mismatch");
    for (std::size_t k = 1; k < set.weights.size(); ++k) {
      if (!(set.weights[k] > set.weights[k - 1])) {
        out.push_back("set " + set.name +
                      ": reference weights must be strictly increasing");
        break;
      }
    }
    for (int m : set.members) {
      if (m < 0 || m >= num_columns()) {
        out.push_back("set " + set.name + ": member index out of range");
        break;
      }
      if (owner[m] >= 0)
        out.push_back("column " + columns_[m].name +
                      " belongs to more than one set");
      owner[m] = static_cast<int>(s);
    }
  }
  return out;
}

std::string level_column_name(const std::string& campaign, int level) {
  return "D_" + campaign + "_" + std::to_string(level);
}
std::string convexity_row_name(const std::string& campaign) {
  return "CVX_" + campaign;
}
std::string budget_row_name(const std::string& business) {
  return "BUD_" + business;
}
std::string click_row_name(const std::string& business) {
  return "CLK_" + business;
}
std::string sos_set_name(const std::string& campaign) { return "S_" + campaign; }

// A rounding residue left in a click row would be scaled up into a binding
// constraint.
double click_margin(double ad_value, double cost_per_impression) {
  const double diff = ad_value - cost_per_impression;
  const double scale = std::max(std::abs(ad_value), std::abs(cost_per_impression));
  return std::abs(diff) <= kCancellationTol * scale ? 0.0 : diff;
}

LpModel build_model(const Instance& instance) {
  const auto violations = validate_instance(instance);
  if (!violations.empty()) {
    std::string msg = "invalid instance:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw InputError(msg);
  }

  LpModel model;
  model.sense = ObjectiveSense::kMaximize;

  std::map<std::string, std::size_t> business_pos;
  for (std::size_t k = 0; k < instance.businesses.size(); ++k)
    business_pos[instance.businesses[k].id] = k;

  // Row layout: CVX per campaign, then BUD/CLK per business, then IMP.
  const std::size_t num_campaigns = instance.campaigns.size();
  std::vector<Row> cvx(num_campaigns);
  std::vector<Row> bud(instance.businesses.size());
  std::vector<Row> clk(instance.businesses.size());
  Row imp{kImpressionRowName, RowSense::kLessEqual, instance.impression_budget,
          {}};

  for (std::size_t k = 0; k < instance.businesses.size(); ++k) {
    const auto& b = instance.businesses[k];
    bud[k] = Row{budget_row_name(b.id), RowSense::kLessEqual, b.budget, {}};
    clk[k] = Row{click_row_name(b.id), RowSense::kLessEqual, 0.0, {}};
  }

  for (std::size_t i = 0; i < num_campaigns; ++i) {
    const auto& c = instance.campaigns[i];
    const std::size_t k = business_pos.at(c.business_id);
    const double cpc = instance.businesses[k].cpc;
    cvx[i] = Row{convexity_row_name(c.id), RowSense::kEqual, 1.0, {}};

    SosSet set{sos_set_name(c.id), 1, {}, {}};
    for (const auto& lv : c.levels) {
      const int col = model.add_column(
          Column{level_column_name(c.id, lv.level_index), lv.ret, 0.0, 1.0});
      cvx[i].entries.push_back({col, 1.0});
      const double spend = lv.impressions * lv.ad_value;
      const double click = lv.impressions * click_margin(lv.ad_value, cpc * c.ctr);
      if (spend != 0.0) bud[k].entries.push_back({col, spend});
      if (click != 0.0) clk[k].entries.push_back({col, click});
      if (lv.impressions != 0.0) imp.entries.push_back({col, lv.impressions});
      set.members.push_back(col);
      set.weights.push_back(static_cast<double>(lv.level_index));
    }
    model.add_sos(std::move(set));
  }

  for (auto& r : cvx) model.add_row(std::move(r));
  for (std::size_t k = 0; k < instance.businesses.size(); ++k) {
    model.add_row(std::move(bud[k]));
    model.add_row(std::move(clk[k]));
  }
  model.add_row(std::move(imp));
  return model;
}

LpModel relax_to_sos2(const LpModel& model) {
  LpModel out = model;
  for (auto& s : out.mutable_sos_sets()) s.type = 2;
  return out;
}

namespace {

const char* sense_token(RowSense s) {
  switch (s) {
    case RowSense::kLessEqual: return "L";
    case RowSense::kEqual: return "E";
    case RowSense::kGreaterEqual: return "G";
  }
  return "L";
}

RowSense parse_sense(const std::string& s) {
  if (s == "L") return RowSense::kLessEqual;
  if (s == "E") return RowSense::kEqual;
  if (s == "G") return RowSense::kGreaterEqual;
  throw InputError("model: unknown row sense '" + s + "'");
}

// JSON has no infinity literal; unbounded sides are written as null.
nlohmann::json bound_to_json(double v) {
  if (std::isinf(v)) return nullptr;
  return v;
}

double bound_from_json(const nlohmann::json& j, double inf_value) {
  if (j.is_null()) return inf_value;
  return j.get<double>();
}

}  // namespace

nlohmann::json model_to_json(const LpModel& model) {
  nlohmann::json j;
  j["name"] = model.name;
  j["sense"] =
      model.sense == ObjectiveSense::kMaximize ? "maximize" : "minimize";
  j["columns"] = nlohmann::json::array();
  for (const auto& c : model.columns()) {
    j["columns"].push_back({{"name", c.name},
                            {"objective", c.objective},
                            {"lower", bound_to_json(c.lower)},
                            {"upper", bound_to_json(c.upper)}});
  }
  j["rows"] = nlohmann::json::array();
  for (const auto& r : model.rows()) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : r.entries)
      entries.push_back({model.columns()[e.column].name, e.value});
    j["rows"].push_back({{"name", r.name},
                         {"sense", sense_token(r.sense)},
                         {"rhs", r.rhs},
                         {"entries", std::move(entries)}});
  }
  j["sos"] = nlohmann::json::array();
  for (const auto& s : model.sos_sets()) {
    nlohmann::json members = nlohmann::json::array();
    for (std::size_t k = 0; k < s.members.size(); ++k)
      members.push_back({model.columns()[s.members[k]].name, s.weights[k]});
    j["sos"].push_back(
        {{"name", s.name}, {"type", s.type}, {"members", std::move(members)}});
  }
  return j;
}

LpModel model_from_json(const nlohmann::json& j) {
  LpModel model;
  try {
    model.name = j.value("name", std::string("BIDOPT"));
    const std::string sense = j.value("sense", std::string("maximize"));
    if (sense == "maximize") {
      model.sense = ObjectiveSense::kMaximize;
    } else if (sense == "minimize") {
      model.sense = ObjectiveSense::kMinimize;
    } else {
      throw InputError("model: unknown objective sense '" + sense + "'");
    }
    const double inf = std::numeric_limits<double>::infinity();
    for (const auto& jc : j.at("columns")) {
      model.add_column(Column{jc.at("name").get<std::string>(),
                              jc.at("objective").get<double>(),
                              bound_from_json(jc.at("lower"), -inf),
                              bound_from_json(jc.at("upper"), inf)});
    }
    auto lookup = [&model](const std::string& name) {
      auto idx = model.column_index(name);
      if (!idx) throw InputError("model: unknown column '" + name + "'");
      return *idx;
    };
    for (const auto& jr : j.at("rows")) {
      Row r{jr.at("name").get<std::string>(),
            parse_sense(jr.at("sense").get<std::string>()),
            jr.at("rhs").get<double>(),
            {}};
      for (const auto& e : jr.at("entries"))
        r.entries.push_back({lookup(e.at(0).get<std::string>()),
                             e.at(1).get<double>()});
      model.add_row(std::move(r));
    }
    for (const auto& js : j.at("sos")) {
      SosSet s{js.at("name").get<std::string>(), js.at("type").get<int>(), {},
               {}};
      for (const auto& m : js.at("members")) {
        s.members.push_back(lookup(m.at(0).get<std::string>()));
        s.weights.push_back(m.at(1).get<double>());
      }
      model.add_sos(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("model: ") + e.what());
  }
  auto problems = model.check();
  if (!problems.empty()) throw InputError("model: " + problems.front());
  return model;
}

}  // namespace bidopt
