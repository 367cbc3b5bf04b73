#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bidopt/instance.hpp"

namespace bidopt {

enum class RowSense { kLessEqual, kEqual, kGreaterEqual };
enum class ObjectiveSense { kMaximize, kMinimize };

struct Column {
  std::string name;
  double objective = 0.0;
  double lower = 0.0;
  double upper = 1.0;

  bool operator==(const Column&) const = default;
};

struct RowEntry {
  int column = 0;
  double value = 0.0;

  bool operator==(const RowEntry&) const = default;
};

struct Row {
  std::string name;
  RowSense sense = RowSense::kLessEqual;
  double rhs = 0.0;
  std::vector<RowEntry> entries;

  bool operator==(const Row&) const = default;
};

// An ordered special set. Members are column positions in set order;
// reference weights are strictly increasing.
struct SosSet {
  std::string name;
  int type = 1;
  std::vector<int> members;
  std::vector<double> weights;

  bool operator==(const SosSet&) const = default;
};

class LpModel {
 public:
  std::string name = "BIDOPT";
  ObjectiveSense sense = ObjectiveSense::kMaximize;

  int add_column(Column c);
  int add_row(Row r);
  void add_sos(SosSet s) { sos_sets_.push_back(std::move(s)); }

  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<Row>& rows() const { return rows_; }
  const std::vector<SosSet>& sos_sets() const { return sos_sets_; }
  std::vector<SosSet>& mutable_sos_sets() { return sos_sets_; }
  std::vector<Row>& mutable_rows() { return rows_; }

  int num_columns() const { return static_cast<int>(columns_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }

  std::optional<int> column_index(const std::string& name) const;
  std::optional<int> row_index(const std::string& name) const;
  std::optional<int> sos_index(const std::string& name) const;

  double row_activity(int row, std::span<const double> x) const;
  double objective_value(std::span<const double> x) const;

  // Structural problems (bad indices, inverted bounds, unordered weights...).
  std::vector<std::string> check() const;

  bool operator==(const LpModel& o) const {
    return name == o.name && sense == o.sense && columns_ == o.columns_ &&
           rows_ == o.rows_ && sos_sets_ == o.sos_sets_;
  }

 private:
  std::vector<Column> columns_;
  std::vector<Row> rows_;
  std::vector<SosSet> sos_sets_;
  std::unordered_map<std::string, int> column_index_;
  std::unordered_map<std::string, int> row_index_;
};

// Fixed naming scheme so MPS output is deterministic.
std::string level_column_name(const std::string& campaign, int level);
std::string convexity_row_name(const std::string& campaign);
std::string budget_row_name(const std::string& business);
std::string click_row_name(const std::string& business);
inline constexpr const char* kImpressionRowName = "IMP";
std::string sos_set_name(const std::string& campaign);

// Relative size below which AV - CPC*CTR counts as cancelled to zero.
inline constexpr double kCancellationTol = 1e-12;

// Per-impression click-value margin AV - CPC*CTR; exactly zero when the two
// terms agree to within kCancellationTol of the larger.
double click_margin(double ad_value, double cost_per_impression);

// Builds the bid-level LP: one [0,1] column per campaign level, a convexity
// row per campaign, budget and click-value rows per business, one impression
// row, and one SOS1 set per campaign. Exact-zero coefficients are omitted.
// Throws InputError on invalid instances.
LpModel build_model(const Instance& instance);

// Same matrix, every set retyped as SOS2.
LpModel relax_to_sos2(const LpModel& model);

nlohmann::json model_to_json(const LpModel& model);
LpModel model_from_json(const nlohmann::json& j);

}  // namespace bidopt
