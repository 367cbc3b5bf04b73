#include "bidopt/solution_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "bidopt/errors.hpp"

namespace bidopt {

std::string format_fixed12(double v) {
  if (std::abs(v) < 5e-13) v = 0.0;  // no "-0.000000000000"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", v);
  return buf;
}

std::string write_solution(const SolveReport& report, std::span<const double> solution,
                           const LpModel& model, const Instance* instance,
                           const SolutionWriteOptions& options) {
  std::ostringstream out;
  const bool bounded = report.status != SearchStatus::kInfeasible &&
                       report.status != SearchStatus::kLpFailure;
  out << "STATUS " << to_string(report.status) << "\n";
  out << "OBJECTIVE " << (report.has_incumbent ? format_fixed12(report.incumbent_objective) : "-")
      << "\n";
  out << "LP_BOUND " << (bounded ? format_fixed12(report.lp_relaxation_objective) : "-") << "\n";
  out << "DEGRADATION_PCT ";
  if (report.has_incumbent) {
    out << format_fixed12(report.degradation.value);
    if (!report.degradation.relative) out << " undefined-relative";
  } else {
    out << "-";
  }
  out << "\n";
  out << "STRATEGY "
      << (options.strategy_label.empty() ? to_string(report.strategy) : options.strategy_label)
      << "\n";
  out << "SOS_TYPE " << report.sos_type_used << "\n";
  out << "SECONDS " << (options.omit_timing ? "-" : format_fixed12(report.total_seconds)) << "\n";
  out << "NODES " << report.nodes << "\n";
  if (!report.has_incumbent) return out.str();

  for (int j = 0; j < model.num_columns(); ++j)
    if (solution[j] != 0.0)
      out << "COLUMN " << model.columns()[j].name << " " << format_fixed12(solution[j]) << "\n";

  if (instance) {
    for (const auto& c : instance->campaigns) {
      std::vector<double> values(c.levels.size(), 0.0);
      bool complete = true;
      for (std::size_t j = 0; j < c.levels.size(); ++j) {
        const auto col = model.column_index(level_column_name(c.id, c.levels[j].level_index));
        if (!col) {
          complete = false;
          break;
        }
        values[j] = solution[*col];
      }
      if (!complete) continue;
      if (const auto bid = interpolate_bid(c, values))
        out << "BID " << c.id << " " << format_fixed12(*bid) << "\n";
    }
  }
  return out.str();
}

namespace {

double parse_real(const std::string& s, int line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InputError("solution: line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

}  // namespace

SolutionFile parse_solution(const std::string& text) {
  static const char* const kHeaders[] = {"STATUS",   "OBJECTIVE", "LP_BOUND", "DEGRADATION_PCT",
                                         "STRATEGY", "SOS_TYPE",  "SECONDS",  "NODES"};
  SolutionFile file;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string& key = tok[0];
    if (key == "COLUMN" || key == "BID") {
      if (tok.size() != 3)
        throw InputError("solution: line " + std::to_string(line_no) + ": expected '" + key +
                         " <name> <value>'");
      auto& dest = key == "COLUMN" ? file.columns : file.bids;
      dest.emplace_back(tok[1], parse_real(tok[2], line_no));
      continue;
    }
    bool known = false;
    for (const char* h : kHeaders) known = known || key == h;
    if (!known)
      throw InputError("solution: line " + std::to_string(line_no) + ": unknown record '" + key +
                       "'");
    if (tok.size() < 2)
      throw InputError("solution: line " + std::to_string(line_no) + ": missing value");
    std::string value = tok[1];
    for (std::size_t k = 2; k < tok.size(); ++k) value += " " + tok[k];
    file.header[key] = value;
  }
  return file;
}

FeasibilityCheck verify_solution(const Instance& instance, const SolutionFile& file,
                                 int sos_type, double tol, double zero_tol) {
  std::unordered_map<std::string, std::pair<int, int>> where;
  LevelValues values;
  for (std::size_t i = 0; i < instance.campaigns.size(); ++i) {
    const auto& c = instance.campaigns[i];
    values.emplace_back(c.levels.size(), 0.0);
    for (std::size_t j = 0; j < c.levels.size(); ++j)
      where[level_column_name(c.id, c.levels[j].level_index)] = {static_cast<int>(i),
                                                                 static_cast<int>(j)};
  }
  std::vector<std::string> problems;
  std::vector<std::vector<bool>> seen;
  for (const auto& row : values) seen.emplace_back(row.size(), false);
  for (const auto& [name, value] : file.columns) {
    auto it = where.find(name);
    if (it == where.end()) {
      problems.push_back("unknown column " + name);
      continue;
    }
    const auto [i, j] = it->second;
    if (seen[i][j]) problems.push_back("column " + name + " listed twice");
    seen[i][j] = true;
    values[i][j] = value;
  }
  FeasibilityCheck check = check_assignment(instance, values, sos_type, tol, zero_tol);
  auto obj = file.header.find("OBJECTIVE");
  if (obj != file.header.end() && obj->second != "-") {
    const double stated = parse_real(obj->second, 0);
    if (std::abs(stated - check.objective) > tol * std::max(1.0, std::abs(check.objective)))
      problems.push_back("stated objective " + obj->second + " differs from recomputed " +
                         format_fixed12(check.objective));
  }
  for (auto& p : problems) {
    check.feasible = false;
    check.problems.push_back(std::move(p));
  }
  return check;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

}  // namespace bidopt
