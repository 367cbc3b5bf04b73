#include "bidopt/mps.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "bidopt/errors.hpp"

namespace bidopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr const char* kObjectiveRow = "OBJ";
constexpr int kFieldStart[] = {2, 5, 15, 25, 40, 50};

std::string number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Builds one data line; fields[i] lands in classic field slot first + i.
std::string fixed_line(int first, std::initializer_list<std::string> fields) {
  std::string line;
  int slot = first;
  for (const auto& f : fields) {
    const std::size_t start = static_cast<std::size_t>(kFieldStart[slot++] - 1);
    if (line.size() < start)
      line.append(start - line.size(), ' ');
    else
      line.push_back(' ');
    line += f;
  }
  return line + "\n";
}

const char* row_type(RowSense s) {
  switch (s) {
    case RowSense::kLessEqual: return "L";
    case RowSense::kEqual: return "E";
    case RowSense::kGreaterEqual: return "G";
  }
  return "L";
}

struct Token {
  std::string text;
  int column = 0;  // 1-based
};

std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    out.push_back(Token{line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

std::optional<double> parse_number(const std::string& s) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (begin != end && *begin == '+') ++begin;
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    if (s == "inf" || s == "+inf" || s == "Infinity") return kInf;
    if (s == "-inf" || s == "-Infinity") return -kInf;
    return std::nullopt;
  }
  return v;
}

class Reader {
 public:
  LpModel parse(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    bool ended = false;
    while (std::getline(in, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (line[0] == '*') {
        comment(line);
        continue;
      }
      const auto tokens = tokenize(line);
      if (tokens.empty()) continue;
      if (!std::isspace(static_cast<unsigned char>(line[0]))) {
        if (ended) fail(tokens[0], "data after ENDATA");
        section(tokens);
        if (section_ == Section::kEnd) ended = true;
        continue;
      }
      data(tokens);
    }
    if (!ended) throw InputError("mps: missing ENDATA");
    for (auto& c : columns_) model_.add_column(std::move(c));
    for (auto& r : rows_) model_.add_row(std::move(r));
    for (auto& s : sets_) model_.add_sos(std::move(s));
    const auto problems = model_.check();
    if (!problems.empty()) throw InputError("mps: " + problems.front());
    return std::move(model_);
  }

 private:
  enum class Section { kNone, kName, kObjSense, kRows, kColumns, kRhs, kBounds, kSos, kEnd };

  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    throw InputError("mps: line " + std::to_string(line_no_) + ", column " +
                     std::to_string(t.column) + ": " + msg);
  }

  double number_at(const Token& t) const {
    const auto v = parse_number(t.text);
    if (!v) fail(t, "expected a number, got '" + t.text + "'");
    return *v;
  }

  void comment(const std::string& line) {
    const auto tokens = tokenize(line.substr(1));
    if (tokens.size() == 2 && tokens[0].text == "OBJSENSE") set_sense(tokens[1]);
  }

  void set_sense(const Token& t) {
    if (t.text == "MAX" || t.text == "MAXIMIZE")
      model_.sense = ObjectiveSense::kMaximize;
    else if (t.text == "MIN" || t.text == "MINIMIZE")
      model_.sense = ObjectiveSense::kMinimize;
    else
      fail(t, "unknown objective sense '" + t.text + "'");
  }

  void section(const std::vector<Token>& tokens) {
    const std::string& name = tokens[0].text;
    if (name == "NAME") {
      section_ = Section::kName;
      model_.name = tokens.size() > 1 ? tokens[1].text : "";
    } else if (name == "OBJSENSE") {
      section_ = Section::kObjSense;
      if (tokens.size() > 1) set_sense(tokens[1]);
    } else if (name == "ROWS") {
      section_ = Section::kRows;
    } else if (name == "COLUMNS") {
      section_ = Section::kColumns;
    } else if (name == "RHS") {
      section_ = Section::kRhs;
    } else if (name == "BOUNDS") {
      section_ = Section::kBounds;
    } else if (name == "SOS") {
      section_ = Section::kSos;
    } else if (name == "ENDATA") {
      section_ = Section::kEnd;
    } else {
      fail(tokens[0], "unsupported section '" + name + "'");
    }
  }

  void data(const std::vector<Token>& t) {
    switch (section_) {
      case Section::kNone:
      case Section::kName:
      case Section::kEnd: fail(t[0], "data line outside a section");
      case Section::kObjSense: set_sense(t[0]); return;
      case Section::kRows: return row_line(t);
      case Section::kColumns: return column_line(t);
      case Section::kRhs: return rhs_line(t);
      case Section::kBounds: return bound_line(t);
      case Section::kSos: return sos_line(t);
    }
  }

  void row_line(const std::vector<Token>& t) {
    if (t.size() != 2) fail(t[0], "expected '<type> <row>'");
    const std::string& type = t[0].text;
    const std::string& name = t[1].text;
    if (type == "N") {
      if (objective_name_.empty()) objective_name_ = name;
      else fail(t[0], "more than one objective row");
      return;
    }
    RowSense sense;
    if (type == "L") sense = RowSense::kLessEqual;
    else if (type == "E") sense = RowSense::kEqual;
    else if (type == "G") sense = RowSense::kGreaterEqual;
    else fail(t[0], "unknown row type '" + type + "'");
    if (row_pos_.count(name) || name == objective_name_) fail(t[1], "duplicate row '" + name + "'");
    row_pos_[name] = static_cast<int>(rows_.size());
    rows_.push_back(Row{name, sense, 0.0, {}});
  }

  int column_for(const Token& t, bool create) {
    auto it = column_pos_.find(t.text);
    if (it != column_pos_.end()) {
      if (create && it->second != static_cast<int>(columns_.size()) - 1)
        fail(t, "entries of column '" + t.text + "' are not contiguous");
      return it->second;
    }
    if (!create) fail(t, "unknown column '" + t.text + "'");
    const int idx = static_cast<int>(columns_.size());
    column_pos_[t.text] = idx;
    // MPS default bounds.
    columns_.push_back(Column{t.text, 0.0, 0.0, kInf});
    return idx;
  }

  void column_line(const std::vector<Token>& t) {
    if (t.size() >= 2 && t[1].text == "'MARKER'") fail(t[1], "integer markers are not supported");
    if (t.size() != 3 && t.size() != 5) fail(t[0], "expected '<column> <row> <value> [<row> <value>]'");
    const int col = column_for(t[0], true);
    for (std::size_t k = 1; k + 1 < t.size(); k += 2) {
      const double v = number_at(t[k + 1]);
      if (t[k].text == objective_name_) {
        columns_[col].objective = v;
        continue;
      }
      auto it = row_pos_.find(t[k].text);
      if (it == row_pos_.end()) fail(t[k], "unknown row '" + t[k].text + "'");
      rows_[it->second].entries.push_back(RowEntry{col, v});
    }
  }

  void rhs_line(const std::vector<Token>& t) {
    if (t.size() != 3 && t.size() != 5) fail(t[0], "expected '<set> <row> <value> [<row> <value>]'");
    for (std::size_t k = 1; k + 1 < t.size(); k += 2) {
      const double v = number_at(t[k + 1]);
      if (t[k].text == objective_name_) fail(t[k], "objective constants are not supported");
      auto it = row_pos_.find(t[k].text);
      if (it == row_pos_.end()) fail(t[k], "unknown row '" + t[k].text + "'");
      rows_[it->second].rhs = v;
    }
  }

  void bound_line(const std::vector<Token>& t) {
    if (t.size() < 3) fail(t[0], "expected '<type> <set> <column> [<value>]'");
    const std::string& type = t[0].text;
    Column& c = columns_[column_for(t[2], false)];
    auto value = [&]() {
      if (t.size() != 4) fail(t[0], "bound type " + type + " needs a value");
      return number_at(t[3]);
    };
    if (type == "UP") c.upper = value();
    else if (type == "LO") c.lower = value();
    else if (type == "FX") c.lower = c.upper = value();
    else if (type == "FR") { c.lower = -kInf; c.upper = kInf; }
    else if (type == "MI") c.lower = -kInf;
    else if (type == "PL") c.upper = kInf;
    else if (type == "BV") { c.lower = 0.0; c.upper = 1.0; }
    else fail(t[0], "unknown bound type '" + type + "'");
  }

  void sos_line(const std::vector<Token>& t) {
    const bool typed = t[0].text == "S1" || t[0].text == "S2";
    const bool header =
        typed && ((t.size() == 2 && !parse_number(t[1].text)) || (t.size() >= 3 && t[1].text == "SOS"));
    if (header) {
      const std::string& name = t.size() == 2 ? t[1].text : t[2].text;
      for (const auto& s : sets_)
        if (s.name == name) fail(t.size() == 2 ? t[1] : t[2], "duplicate set '" + name + "'");
      sets_.push_back(SosSet{name, t[0].text == "S1" ? 1 : 2, {}, {}});
      return;
    }
    if (sets_.empty()) fail(t[0], "set member before any S1/S2 header");
    if (t.size() != 2) fail(t[0], "expected '<column> <weight>'");
    SosSet& set = sets_.back();
    const int col = column_for(t[0], false);
    const double w = number_at(t[1]);
    if (!set.weights.empty() && !(w > set.weights.back()))
      fail(t[1], "reference weights must be strictly increasing");
    set.members.push_back(col);
    set.weights.push_back(w);
  }

  int line_no_ = 0;
  Section section_ = Section::kNone;
  LpModel model_;
  std::string objective_name_;
  std::vector<Column> columns_;
  std::vector<Row> rows_;
  std::vector<SosSet> sets_;
  std::unordered_map<std::string, int> row_pos_;
  std::unordered_map<std::string, int> column_pos_;
};

}  // namespace

std::string write_mps(const LpModel& model) {
  std::string out;
  out += model.sense == ObjectiveSense::kMaximize ? "* OBJSENSE MAX\n" : "* OBJSENSE MIN\n";
  out += "NAME          " + model.name + "\n";
  out += "ROWS\n";
  out += fixed_line(0, {"N", kObjectiveRow});
  for (const auto& r : model.rows()) out += fixed_line(0, {row_type(r.sense), r.name});

  // Column-wise view of the row entries, rows in model order.
  std::vector<std::vector<std::pair<int, double>>> by_column(model.num_columns());
  for (int i = 0; i < model.num_rows(); ++i)
    for (const auto& e : model.rows()[i].entries) by_column[e.column].emplace_back(i, e.value);

  out += "COLUMNS\n";
  for (int j = 0; j < model.num_columns(); ++j) {
    const Column& c = model.columns()[j];
    out += fixed_line(1, {c.name, kObjectiveRow, number(c.objective)});
    for (const auto& [row, value] : by_column[j])
      out += fixed_line(1, {c.name, model.rows()[row].name, number(value)});
  }

  out += "RHS\n";
  for (const auto& r : model.rows())
    if (r.rhs != 0.0) out += fixed_line(1, {"RHS", r.name, number(r.rhs)});

  out += "BOUNDS\n";
  for (const auto& c : model.columns()) {
    if (c.lower == c.upper) {
      out += fixed_line(0, {"FX", "BND", c.name, number(c.lower)});
      continue;
    }
    if (c.lower == -kInf && c.upper == kInf) {
      out += fixed_line(0, {"FR", "BND", c.name});
      continue;
    }
    if (c.lower == -kInf)
      out += fixed_line(0, {"MI", "BND", c.name});
    else if (c.lower != 0.0)
      out += fixed_line(0, {"LO", "BND", c.name, number(c.lower)});
    if (c.upper != kInf) out += fixed_line(0, {"UP", "BND", c.name, number(c.upper)});
  }

  if (!model.sos_sets().empty()) {
    out += "SOS\n";
    for (const auto& s : model.sos_sets()) {
      out += fixed_line(0, {s.type == 1 ? "S1" : "S2", s.name});
      for (std::size_t k = 0; k < s.members.size(); ++k)
        out += fixed_line(1, {model.columns()[s.members[k]].name, number(s.weights[k])});
    }
  }
  out += "ENDATA\n";
  return out;
}

LpModel read_mps(const std::string& text) { return Reader().parse(text); }

LpModel read_mps_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open MPS file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return read_mps(buf.str());
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_mps_file(const LpModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write MPS file '" + path + "'");
  out << write_mps(model);
}

}  // namespace bidopt
