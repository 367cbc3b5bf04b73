#include "bidopt/bench.hpp"

#include <cstdio>
#include <sstream>

#include "bidopt/lp_model.hpp"

namespace bidopt {

std::vector<BenchRow> run_benchmark(const std::vector<BenchCase>& cases,
                                    const BenchOptions& options) {
  std::vector<BenchRow> rows;
  for (const auto& c : cases) {
    const LpModel model = build_model(c.instance);
    for (Strategy s : options.strategies) {
      SearchOptions opt;
      opt.strategy = s;
      opt.limits = options.limits;
      opt.limits.first_solution = false;
      opt.heuristics = options.heuristics;
      opt.simplex = options.simplex;
      SearchResult r = branch_and_bound(model, opt);
      rows.push_back(BenchRow{c.label, static_cast<int>(c.instance.campaigns.size()), s,
                              r.report});
    }
  }
  return rows;
}

namespace {

std::string fmt(const char* format, double v) {
  if (v == 0.0) v = 0.0;  // drops the sign of -0
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string degradation_cell(const Degradation& d) {
  std::string s = fmt("%.4f", d.value);
  if (!d.relative) s += " (abs)";
  return s;
}

}  // namespace

std::string bench_csv(const std::vector<BenchRow>& rows, bool omit_timing) {
  std::ostringstream out;
  out << "model,sos_count,strategy,degradation_pct,first_solution_seconds,"
         "best_known_degradation_pct\n";
  for (const auto& r : rows) {
    out << r.label << "," << r.sos_count << "," << to_string(r.strategy) << ",";
    if (!r.report.has_incumbent) {
      out << "????," << (omit_timing ? "-" : ">limit") << ",????\n";
      continue;
    }
    out << degradation_cell(r.report.first_solution_degradation) << ","
        << (omit_timing ? "-" : fmt("%.3f", r.report.first_solution_seconds)) << ","
        << degradation_cell(r.report.degradation) << "\n";
  }
  return out.str();
}

}  // namespace bidopt
