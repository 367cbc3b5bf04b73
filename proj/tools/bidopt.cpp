// Command-line driver: instance generation, solving, brute-force reference
// solutions, format conversion, benchmark tables and solution verification.
//
// Exit codes: 0 success, 1 infeasible (or a failed verification), 2 limit
// reached without an incumbent, 3 input error.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <string>

#include "bidopt/bench.hpp"
#include "bidopt/errors.hpp"
#include "bidopt/generate.hpp"
#include "bidopt/instance.hpp"
#include "bidopt/lp_model.hpp"
#include "bidopt/mps.hpp"
#include "bidopt/oracle.hpp"
#include "bidopt/search.hpp"
#include "bidopt/solution_io.hpp"

namespace {

using namespace bidopt;

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitNoIncumbent = 2;
constexpr int kExitInputError = 3;

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// "N" or "A-B".
CountRange parse_range(const std::string& text, const char* what) {
  try {
    const auto dash = text.find('-');
    std::size_t used = 0;
    CountRange r;
    if (dash == std::string::npos) {
      r.min = r.max = std::stoi(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
    } else {
      r.min = std::stoi(text.substr(0, dash), &used);
      if (used != dash) throw std::invalid_argument(text);
      const std::string hi = text.substr(dash + 1);
      r.max = std::stoi(hi, &used);
      if (used != hi.size()) throw std::invalid_argument(text);
    }
    return r;
  } catch (const std::logic_error&) {
    throw InputError(std::string(what) + ": expected N or A-B, got '" + text + "'");
  }
}

void env_override(const char* name, double& target) {
  const char* v = std::getenv(name);
  if (!v || !*v) return;
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != std::string(v).size() || !(d >= 0.0)) throw std::invalid_argument(v);
    target = d;
  } catch (const std::logic_error&) {
    throw InputError(std::string(name) + ": not a nonnegative number: '" + v + "'");
  }
}

void apply_env(HeuristicOptions& h, SimplexOptions& s) {
  env_override("BIDOPT_FEAS_TOL", s.feasibility_tol);
  env_override("BIDOPT_OPT_TOL", s.optimality_tol);
  env_override("BIDOPT_ZERO_TOL", h.zero_tol);
  env_override("BIDOPT_NEAR_ONE_TOL", h.near_one_tol);
  env_override("BIDOPT_RC_TOL", h.rc_tol);
}

struct Loaded {
  std::optional<Instance> instance;
  LpModel model;
};

// .mps files hold a model; .json files hold an instance (has "campaigns")
// or a model.
Loaded load_input(const std::string& path) {
  Loaded out;
  if (ends_with(path, ".mps")) {
    out.model = read_mps_file(path);
    return out;
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  try {
    if (j.is_object() && j.contains("campaigns")) {
      out.instance = instance_from_json(j);
      out.model = build_model(*out.instance);
    } else {
      out.model = model_from_json(j);
    }
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
  return out;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_text_file(path, text);
}

struct GenFlags {
  GenParams params;
  std::string campaigns = "1";
  std::string levels = "3";
  std::string shape = "uniform";

  void add(CLI::App* app) {
    app->add_option("--businesses", params.businesses, "Number of businesses")->capture_default_str();
    app->add_option("--campaigns", campaigns, "Campaigns per business, N or A-B")->capture_default_str();
    app->add_option("--levels", levels, "Levels per campaign including the slack, N or A-B")
        ->capture_default_str();
    app->add_option("--budget-tightness", params.budget_tightness,
                    "Budget as a multiple of the max-return spend")
        ->capture_default_str();
    app->add_option("--impression-tightness", params.impression_tightness,
                    "Impression budget as a multiple of the max-return impressions")
        ->capture_default_str();
    app->add_option("--click-margin", params.click_margin,
                    "CPC as a multiple of the largest top-level AV/CTR")
        ->capture_default_str();
    app->add_option("--shape", shape, "uniform, front-loaded or back-loaded")->capture_default_str();
    app->add_option("--seed", params.seed, "Random seed")->capture_default_str();
  }

  GenParams resolve() {
    GenParams p = params;
    p.campaigns_per_business = parse_range(campaigns, "--campaigns");
    p.levels_per_campaign = parse_range(levels, "--levels");
    p.curve_shape = curve_shape_from_string(shape);
    return p;
  }
};

struct LimitFlags {
  double time_limit = std::numeric_limits<double>::infinity();
  long node_limit = 0;
  double gap = 1e-4;

  void add(CLI::App* app) {
    app->add_option("--time-limit", time_limit, "Wall-clock limit in seconds");
    app->add_option("--node-limit", node_limit, "Node limit (0 = none)")->capture_default_str();
    app->add_option("--gap", gap, "Relative optimality gap")->capture_default_str();
  }

  SearchLimits limits() const {
    SearchLimits l;
    l.time_limit_seconds = time_limit;
    l.node_limit = node_limit;
    l.gap = gap;
    return l;
  }
};

int run_generate(GenFlags& flags, int total, const std::string& out) {
  const GenParams p = flags.resolve();
  const Instance inst = total > 0 ? generate_with_campaign_count(p, total) : generate_instance(p);
  emit(out, instance_to_json(inst).dump(2) + "\n");
  return kExitOk;
}

struct SolveFlags {
  std::string input;
  std::string strategy = "none";
  int sos = 0;
  bool first_solution = true;
  LimitFlags limits;
  std::string mps_out;
  std::string out;
  bool omit_timing = false;
  bool verify = false;
};

int run_solve(const SolveFlags& f) {
  Loaded in = load_input(f.input);
  SearchOptions opt;
  opt.strategy = strategy_from_string(f.strategy);
  opt.limits = f.limits.limits();
  opt.limits.first_solution = f.first_solution;
  apply_env(opt.heuristics, opt.simplex);

  const int sos = f.sos != 0 ? f.sos : (opt.strategy == Strategy::kSos2HotStart ? 2 : 1);
  if (opt.strategy == Strategy::kSos2HotStart && sos != 2)
    throw InputError("strategy 3 works on the SOS2 relaxation; use --sos 2");
  LpModel model = sos == 2 ? relax_to_sos2(in.model) : in.model;
  if (!f.mps_out.empty()) write_mps_file(model, f.mps_out);

  const SearchResult r = branch_and_bound(model, opt);
  const Instance* inst = in.instance ? &*in.instance : nullptr;
  emit(f.out, write_solution(r.report, r.solution, model, inst, {f.omit_timing, ""}));

  const SolveReport& rep = r.report;
  std::cerr << "status " << to_string(rep.status);
  if (rep.has_incumbent)
    std::cerr << ", objective " << format_fixed12(rep.incumbent_objective) << ", degradation "
              << format_fixed12(rep.degradation.value) << "%";
  if (rep.rolled_back) std::cerr << ", fixes rolled back";
  std::cerr << ", nodes " << rep.nodes << "\n";

  if (f.verify && rep.has_incumbent) {
    if (!inst) throw InputError("--verify needs an instance file");
    const SolutionFile parsed = parse_solution(write_solution(rep, r.solution, model, inst));
    const FeasibilityCheck check = verify_solution(*inst, parsed, sos, 1e-6, opt.heuristics.zero_tol);
    for (const auto& p : check.problems) std::cerr << "verify: " << p << "\n";
    if (!check.feasible) return kExitInfeasible;
    std::cerr << "verify: ok\n";
  }
  if (rep.status == SearchStatus::kInfeasible) return kExitInfeasible;
  if (!rep.has_incumbent) return kExitNoIncumbent;
  return kExitOk;
}

int run_oracle(const std::string& input, int sos, std::uint64_t cap, const std::string& out,
               bool omit_timing) {
  const Instance inst = read_instance_file(input);
  LpModel model = build_model(inst);
  if (sos == 2) model = relax_to_sos2(model);
  OracleOptions opt;
  opt.cap = cap;
  double objective = 0.0;
  LevelValues values;
  if (sos == 1) {
    const auto r = enumerate_sos1(inst, opt);
    objective = r.objective;
    values = values_from_sos1(inst, r.levels);
  } else {
    const auto r = enumerate_sos2(inst, opt);
    objective = r.objective;
    values = values_from_sos2(inst, r.choices);
  }
  std::vector<double> x;
  for (const auto& row : values) x.insert(x.end(), row.begin(), row.end());

  const LpSolution lp = solve_lp(model, Bounds(model));
  SolveReport rep;
  rep.status = SearchStatus::kOptimal;
  rep.has_incumbent = true;
  rep.incumbent_objective = objective;
  rep.lp_relaxation_objective = lp.objective;
  rep.degradation = degradation(lp.objective, objective);
  rep.sos_type_used = sos;
  rep.sos_count = static_cast<int>(model.sos_sets().size());
  emit(out, write_solution(rep, x, model, &inst, {omit_timing, "oracle"}));
  return kExitOk;
}

// instance.json -> .mps or model .json; model .json <-> .mps.
int run_convert(const std::string& input, const std::string& output) {
  const Loaded in = load_input(input);
  if (ends_with(output, ".mps"))
    write_mps_file(in.model, output);
  else if (ends_with(output, ".json"))
    write_text_file(output, model_to_json(in.model).dump(2) + "\n");
  else
    throw InputError("convert: output must end in .mps or .json");
  return kExitOk;
}

struct BenchFlags {
  std::vector<std::string> instances;
  std::vector<int> sos_counts;
  std::vector<std::string> strategies{"1", "2", "3"};
  GenFlags gen;
  LimitFlags limits;
  bool omit_timing = false;
  std::string out;
};

int run_bench(BenchFlags& f) {
  std::vector<BenchCase> cases;
  int label = 1;
  for (const auto& path : f.instances)
    cases.push_back(BenchCase{std::to_string(label++), read_instance_file(path)});
  if (!f.sos_counts.empty()) {
    const auto suite = scale_suite(f.gen.resolve(), f.sos_counts);
    for (const auto& inst : suite) cases.push_back(BenchCase{std::to_string(label++), inst});
  }
  if (cases.empty()) throw InputError("bench: give instance files or --sos-counts");
  BenchOptions opt;
  opt.strategies.clear();
  for (const auto& s : f.strategies) opt.strategies.push_back(strategy_from_string(s));
  opt.limits = f.limits.limits();
  apply_env(opt.heuristics, opt.simplex);
  emit(f.out, bench_csv(run_benchmark(cases, opt), f.omit_timing));
  return kExitOk;
}

int run_verify(const std::string& instance_path, const std::string& solution_path, int sos,
               double tol) {
  const Instance inst = read_instance_file(instance_path);
  const SolutionFile file = parse_solution(read_text_file(solution_path));
  if (sos == 0) {
    auto it = file.header.find("SOS_TYPE");
    sos = it != file.header.end() && it->second == "2" ? 2 : 1;
  }
  const FeasibilityCheck check = verify_solution(inst, file, sos, tol);
  for (const auto& p : check.problems) std::cout << "problem: " << p << "\n";
  std::cout << (check.feasible ? "feasible" : "infeasible") << " objective "
            << format_fixed12(check.objective) << "\n";
  return check.feasible ? kExitOk : kExitInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bid-level optimization with special ordered sets"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "Write a synthetic instance as JSON");
  GenFlags gen_flags;
  gen_flags.add(gen);
  int gen_total = 0;
  std::string gen_out;
  gen->add_option("--total-campaigns", gen_total,
                  "Spread exactly this many campaigns over the businesses");
  gen->add_option("-o,--output", gen_out, "Output path (default stdout)");

  auto* solve = app.add_subcommand("solve", "Branch-and-bound with an optional hot start");
  SolveFlags sf;
  solve->add_option("input", sf.input, "Instance JSON, model JSON or MPS file")->required();
  solve->add_option("--strategy", sf.strategy, "none, 1, 2 or 3")
      ->check(CLI::IsMember({"none", "1", "2", "3"}))
      ->capture_default_str();
  solve->add_option("--sos", sf.sos, "Set type to enforce: 1, or 2 for the relaxation")
      ->check(CLI::IsMember({1, 2}));
  solve->add_flag("--first-solution,!--prove", sf.first_solution,
                  "Stop at the first incumbent (default) or prove optimality within the gap");
  sf.limits.add(solve);
  solve->add_option("--mps-out", sf.mps_out, "Also write the solved model as MPS");
  solve->add_option("-o,--output", sf.out, "Solution file (default stdout)");
  solve->add_flag("--omit-timing", sf.omit_timing, "Print '-' for wall-clock fields");
  solve->add_flag("--verify", sf.verify, "Re-check the written solution against the instance");

  auto* oracle = app.add_subcommand("oracle", "Exhaustive enumeration for small instances");
  std::string oracle_in, oracle_out;
  int oracle_sos = 1;
  std::uint64_t oracle_cap = OracleOptions{}.cap;
  bool oracle_omit = false;
  oracle->add_option("input", oracle_in, "Instance JSON")->required();
  oracle->add_option("--sos", oracle_sos, "1 or 2")->check(CLI::IsMember({1, 2}))->capture_default_str();
  oracle->add_option("--cap", oracle_cap, "Maximum number of patterns")->capture_default_str();
  oracle->add_option("-o,--output", oracle_out, "Solution file (default stdout)");
  oracle->add_flag("--omit-timing", oracle_omit, "Print '-' for wall-clock fields");

  auto* convert = app.add_subcommand("convert", "Convert between instance JSON, model JSON and MPS");
  std::string conv_in, conv_out;
  convert->add_option("input", conv_in, "Instance JSON, model JSON or MPS")->required();
  convert->add_option("output", conv_out, "Model JSON or MPS")->required();

  auto* bench = app.add_subcommand("bench", "Degradation and first-solution time per strategy (CSV)");
  BenchFlags bf;
  bench->add_option("instances", bf.instances, "Instance JSON files");
  bench->add_option("--sos-counts", bf.sos_counts, "Generate one instance per campaign count")
      ->delimiter(',');
  bench->add_option("--strategies", bf.strategies, "Comma-separated strategies")
      ->delimiter(',')
      ->check(CLI::IsMember({"none", "1", "2", "3"}))
      ->capture_default_str();
  bf.gen.add(bench);
  bf.limits.add(bench);
  bench->add_flag("--omit-timing", bf.omit_timing, "Print '-' for wall-clock fields");
  bench->add_option("-o,--output", bf.out, "CSV path (default stdout)");

  auto* verify = app.add_subcommand("verify", "Check a solution file against an instance");
  std::string ver_inst, ver_sol;
  int ver_sos = 0;
  double ver_tol = 1e-6;
  verify->add_option("instance", ver_inst, "Instance JSON")->required();
  verify->add_option("solution", ver_sol, "Solution file")->required();
  verify->add_option("--sos", ver_sos, "Set type (default: SOS_TYPE from the file)")
      ->check(CLI::IsMember({1, 2}));
  verify->add_option("--tol", ver_tol, "Relative row tolerance")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (*gen) return run_generate(gen_flags, gen_total, gen_out);
    if (*solve) return run_solve(sf);
    if (*oracle) return run_oracle(oracle_in, oracle_sos, oracle_cap, oracle_out, oracle_omit);
    if (*convert) return run_convert(conv_in, conv_out);
    if (*bench) return run_bench(bf);
    if (*verify) return run_verify(ver_inst, ver_sol, ver_sos, ver_tol);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::length_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
