// Command-line front end: solve one instance, run the experiment sweeps,
// verify a solution file, or generate topology/commodity fixtures.
//
// Exit codes: 0 ok, 1 infeasible (or partial delivery / failed verification),
// 2 invalid input, 3 numerical failure.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mptpt/baselines.hpp"
#include "mptpt/experiments.hpp"
#include "mptpt/pipeline.hpp"
#include "mptpt/rules.hpp"
#include "mptpt/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInfeasible = 1;
constexpr int kInvalidInput = 2;
constexpr int kNumericalFailure = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out << text;
}

/// Accepts the selector language (fig1 | geant | fattree | file:<path>) and,
/// as a convenience, a bare path to a topology JSON file.
mptpt::Topology resolve_topology(const std::string& arg, const std::string& data_dir) {
  if (arg == "fig1" || arg == "geant" || arg == "fattree" || arg.rfind("file:", 0) == 0)
    return mptpt::topology_from_selector(arg, data_dir);
  return mptpt::load_topology(arg);
}

int max_class(const std::vector<mptpt::Commodity>& commodities) {
  int c = 1;
  for (const auto& commodity : commodities) c = std::max(c, commodity.class_id);
  return c;
}

int run_solve(const std::string& topology_arg, const std::string& commodities_path,
              const std::string& algo, int classes_opt, const std::string& out_path,
              const std::string& rules_path, const std::string& data_dir, bool skip_stuck) {
  const mptpt::Topology topo = resolve_topology(topology_arg, data_dir);
  const auto commodities = mptpt::load_commodities(topo, commodities_path);
  if (commodities.empty()) throw std::invalid_argument("no commodities to route");
  const int num_classes = classes_opt > 0 ? classes_opt : max_class(commodities);
  const auto class_specs = mptpt::classes_for(topo, num_classes);

  if (algo == "mptpt") {
    const mptpt::RoutingSolution solution = mptpt::solve_mptpt(topo, commodities, class_specs);
    write_file(out_path, mptpt::solution_to_json(solution, topo));
    std::cout << "status: " << mptpt::to_string(solution.status)
              << "  trees: " << solution.total_trees()
              << " (bound " << solution.stats.bound << ")\n";
    if (solution.status == mptpt::PipelineStatus::Ok) {
      const mptpt::RuleTable table = mptpt::compile_rules(solution, topo, commodities);
      long classify = 0;
      for (int c : table.classify_counts) classify += c;
      // Tag rules and source-side classification entries are separate costs;
      // report both so nothing hides in the average.
      std::cout << "rules: max/switch " << mptpt::max_rule_count(table) << ", avg/switch "
                << mptpt::avg_rule_count(table, topo, false)
                << ", classification entries at sources " << classify << "\n";
      if (!rules_path.empty()) write_file(rules_path, mptpt::rule_table_csv(table, topo));
    }
    switch (solution.status) {
      case mptpt::PipelineStatus::Ok: return kOk;
      case mptpt::PipelineStatus::Step1Infeasible:
      case mptpt::PipelineStatus::Step2Infeasible: return kInfeasible;
      case mptpt::PipelineStatus::NumericalFailure: return kNumericalFailure;
    }
    return kNumericalFailure;
  }

  mptpt::BaselineResult result;
  if (algo == "lp1") {
    result = mptpt::solve_lp1_baseline(topo, commodities, class_specs);
  } else {
    mptpt::GreedyOptions options;
    options.skip_stuck_commodities = skip_stuck;
    result = mptpt::greedy_shortest_path(topo, commodities, class_specs, options);
  }
  write_file(out_path, mptpt::paths_to_json(result, algo, topo));
  std::cout << "routed " << result.routed << " of " << result.total_demand << " over "
            << result.paths.size() << " paths\n";
  if (result.status == mptpt::SolveStatus::Infeasible) return kInfeasible;
  if (result.status != mptpt::SolveStatus::Optimal) return kNumericalFailure;
  return result.fully_routed() ? kOk : kInfeasible;
}

int run_verify(const std::string& solution_path, const std::string& topology_arg,
               const std::string& commodities_path, const std::string& data_dir) {
  const mptpt::Topology topo = resolve_topology(topology_arg, data_dir);
  const auto commodities = mptpt::load_commodities(topo, commodities_path);
  const std::string text = read_file(solution_path);
  const auto header = nlohmann::json::parse(text);
  const std::string form = header.value("form", "");

  std::vector<mptpt::CommodityFlow> flows;
  if (form == "trees") {
    const auto solution = mptpt::solution_from_json(text, topo);
    flows = mptpt::flows_from_trees(solution, topo, commodities);
  } else if (form == "paths") {
    const auto result = mptpt::paths_from_json(text, topo);
    flows = mptpt::flows_from_paths(result.paths, topo, commodities.size());
  } else {
    throw std::invalid_argument("solution file has unknown form '" + form + "'");
  }

  const auto class_specs = mptpt::classes_for(topo, max_class(commodities));
  const auto report = mptpt::verify_routing(topo, commodities, class_specs, flows);
  std::cout << report.to_json();
  return report.pass() ? kOk : kInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Middlebox tree routing: two-step solver, baselines, experiments"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "route one instance and dump the solution");
  std::string topology_arg, commodities_path, out_path, rules_path, data_dir;
  std::string algo = "mptpt";
  int classes_opt = 0;
  bool skip_stuck = false;
  solve->add_option("--topology", topology_arg, "fig1 | geant | fattree | file:<path>")
      ->required();
  solve->add_option("--commodities", commodities_path, "commodity CSV")->required();
  solve->add_option("--algo", algo, "mptpt | lp1 | greedy")
      ->check(CLI::IsMember({"mptpt", "lp1", "greedy"}));
  solve->add_option("--classes", classes_opt, "class count (default: largest class used)");
  solve->add_option("--out", out_path, "solution JSON output")->required();
  solve->add_option("--rules-out", rules_path, "also dump the compiled rule table CSV");
  solve->add_option("--data-dir", data_dir, "override the fixture directory");
  solve->add_flag("--skip-stuck", skip_stuck, "greedy: skip stuck commodities, keep going");

  // exp1 / exp2
  auto* exp1 = app.add_subcommand("exp1", "rule-count sweep, CSV out");
  auto* exp2 = app.add_subcommand("exp2", "max uniform demand sweep, CSV out");
  std::string config_path1, out_path1, config_path2, out_path2;
  exp1->add_option("--config", config_path1, "experiment config JSON")->required();
  exp1->add_option("--out", out_path1, "CSV output")->required();
  exp2->add_option("--config", config_path2, "experiment config JSON")->required();
  exp2->add_option("--out", out_path2, "CSV output")->required();

  // verify
  auto* verify = app.add_subcommand("verify", "check a solution file against every constraint");
  std::string solution_path, vtopology_arg, vcommodities_path, vdata_dir;
  verify->add_option("--solution", solution_path, "solution JSON")->required();
  verify->add_option("--topology", vtopology_arg, "fig1 | geant | fattree | file:<path>")
      ->required();
  verify->add_option("--commodities", vcommodities_path, "commodity CSV")->required();
  verify->add_option("--data-dir", vdata_dir, "override the fixture directory");

  // gen
  auto* gen = app.add_subcommand("gen", "write topology / commodity fixtures");
  bool gen_fig1_flag = false, gen_fattree_flag = false, gen_geant_flag = false;
  std::string gen_out, gen_commodities_out, gen_data_dir;
  int gen_count = 0, gen_classes = 1;
  double gen_demand = 0.2;
  std::uint64_t gen_seed = 1;
  gen->add_flag("--fig1", gen_fig1_flag, "six-switch ring with three PMs");
  gen->add_flag("--fattree", gen_fattree_flag, "two-core fat tree with six PMs");
  gen->add_flag("--geant", gen_geant_flag, "bundled European research network");
  gen->add_option("--out", gen_out, "topology JSON output")->required();
  gen->add_option("--commodities", gen_count, "also draw N random commodities");
  gen->add_option("--classes", gen_classes, "class count for drawn commodities");
  gen->add_option("--demand", gen_demand, "per-commodity demand for drawn commodities");
  gen->add_option("--seed", gen_seed, "RNG seed for drawn commodities");
  gen->add_option("--commodities-out", gen_commodities_out, "commodity CSV output");
  gen->add_option("--data-dir", gen_data_dir, "override the fixture directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalidInput;
  }

  try {
    if (solve->parsed())
      return run_solve(topology_arg, commodities_path, algo, classes_opt, out_path, rules_path,
                       data_dir, skip_stuck);
    if (exp1->parsed()) {
      write_file(out_path1, mptpt::experiment1(mptpt::load_experiment_config(config_path1)));
      return kOk;
    }
    if (exp2->parsed()) {
      write_file(out_path2, mptpt::experiment2(mptpt::load_experiment_config(config_path2)));
      return kOk;
    }
    if (verify->parsed())
      return run_verify(solution_path, vtopology_arg, vcommodities_path, vdata_dir);
    if (gen->parsed()) {
      const int picked = (gen_fig1_flag ? 1 : 0) + (gen_fattree_flag ? 1 : 0) +
                         (gen_geant_flag ? 1 : 0);
      if (picked != 1)
        throw std::invalid_argument("gen: pick exactly one of --fig1 / --fattree / --geant");
      const mptpt::Topology topo = gen_fig1_flag ? mptpt::gen_fig1()
                                   : gen_fattree_flag
                                       ? mptpt::gen_fat_tree()
                                       : mptpt::topology_from_selector("geant", gen_data_dir);
      mptpt::save_topology(topo, gen_out);
      if (gen_count > 0) {
        if (gen_commodities_out.empty())
          throw std::invalid_argument("gen: --commodities needs --commodities-out");
        const auto commodities =
            mptpt::gen_random_commodities(topo, gen_count, gen_classes, gen_demand, gen_seed);
        mptpt::save_commodities(topo, commodities, gen_commodities_out);
      }
      return kOk;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
  return kInvalidInput;
}
