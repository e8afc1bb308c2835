#include "mptpt/experiments.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "mptpt/baselines.hpp"
#include "mptpt/pipeline.hpp"
#include "mptpt/rules.hpp"

#ifndef MPTPT_DATA_DIR
#define MPTPT_DATA_DIR "data"
#endif

namespace mptpt {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

/// Computes rows[0..n) with fn, on every core when there are several.
/// Assembly order is by index, so the CSV is identical either way.
std::vector<std::string> run_rows(int n, const std::function<std::string(int)>& fn) {
  std::vector<std::string> rows(n);
  const unsigned hw = std::thread::hardware_concurrency();
  const int workers = std::min<int>(n, hw > 0 ? static_cast<int>(hw) : 1);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) rows[i] = fn(i);
    return rows;
  }
  std::atomic<int> next{0};
  std::vector<std::string> errors(workers);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i; (i = next.fetch_add(1)) < n;) rows[i] = fn(i);
      } catch (const std::exception& e) {
        errors[w] = e.what();
        next.store(n);
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::string& e : errors)
    if (!e.empty()) throw std::runtime_error("experiment row failed: " + e);
  return rows;
}

struct RowKey {
  int classes;
  int commodities;
  std::uint64_t seed;
  std::string algorithm;
};

std::vector<RowKey> enumerate_rows(const ExperimentConfig& config) {
  std::vector<RowKey> keys;
  for (int c : config.classes)
    for (int m : config.commodity_counts)
      for (std::uint64_t seed : config.seeds)
        for (const std::string& algo : config.algorithms)
          keys.push_back({c, m, seed, algo});
  return keys;
}

std::string topology_label(const std::string& selector) {
  if (selector.rfind("file:", 0) == 0) return selector.substr(5);
  return selector;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
  const auto j = nlohmann::ordered_json::parse(text);
  ExperimentConfig config;
  config.topology = j.value("topology", config.topology);
  if (j.contains("classes")) config.classes = j.at("classes").get<std::vector<int>>();
  if (j.contains("commodities"))
    config.commodity_counts = j.at("commodities").get<std::vector<int>>();
  config.demand = j.value("demand", config.demand);
  if (j.contains("seeds")) config.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("algorithms"))
    config.algorithms = j.at("algorithms").get<std::vector<std::string>>();
  config.step = j.value("step", config.step);
  config.tolerance = j.value("tolerance", config.tolerance);
  validate_config(config);
  return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

std::string experiment_config_to_json(const ExperimentConfig& config) {
  nlohmann::ordered_json j;
  j["topology"] = config.topology;
  j["classes"] = config.classes;
  j["commodities"] = config.commodity_counts;
  j["demand"] = config.demand;
  j["seeds"] = config.seeds;
  j["algorithms"] = config.algorithms;
  j["step"] = config.step;
  j["tolerance"] = config.tolerance;
  return j.dump(2) + "\n";
}

void validate_config(const ExperimentConfig& config) {
  if (config.classes.empty()) throw std::invalid_argument("config: empty class sweep");
  for (int c : config.classes)
    if (c < 1) throw std::invalid_argument("config: class count must be at least 1");
  if (config.commodity_counts.empty())
    throw std::invalid_argument("config: empty commodity sweep");
  for (int m : config.commodity_counts)
    if (m < 0) throw std::invalid_argument("config: negative commodity count");
  if (config.seeds.empty()) throw std::invalid_argument("config: empty seed list");
  if (config.algorithms.empty()) throw std::invalid_argument("config: no algorithms");
  for (const std::string& a : config.algorithms)
    if (a != "mptpt" && a != "lp1" && a != "greedy")
      throw std::invalid_argument("config: unknown algorithm '" + a + "'");
  if (!(config.demand > 0.0)) throw std::invalid_argument("config: demand must be positive");
  if (!(config.step > 0.0)) throw std::invalid_argument("config: step must be positive");
  if (!(config.tolerance > 0.0))
    throw std::invalid_argument("config: tolerance must be positive");
}

Topology topology_from_selector(const std::string& selector, const std::string& data_dir) {
  if (selector == "fig1") return gen_fig1();
  if (selector == "fattree") return gen_fat_tree();
  if (selector == "geant") {
    const std::string dir = data_dir.empty() ? MPTPT_DATA_DIR : data_dir;
    return load_topology(dir + "/geant.json");
  }
  if (selector.rfind("file:", 0) == 0) return load_topology(selector.substr(5));
  throw std::invalid_argument("unknown topology selector '" + selector +
                              "' (expected fig1 | geant | fattree | file:<path>)");
}

std::string experiment1(const ExperimentConfig& config) {
  validate_config(config);
  const Topology topo = topology_from_selector(config.topology);
  const std::string label = topology_label(config.topology);
  const std::vector<RowKey> keys = enumerate_rows(config);

  const auto row = [&](int idx) {
    const RowKey& key = keys[idx];
    const auto commodities =
        gen_random_commodities(topo, key.commodities, key.classes, config.demand, key.seed);
    const auto class_specs = classes_for(topo, key.classes);
    const int bound = theorem1_bound(topo, key.classes, commodities);

    double avg_all = 0.0, avg_used = 0.0;
    int max_rules = 0;
    std::string status = "ok";
    if (commodities.empty()) {
      status = "empty";
    } else if (key.algorithm == "mptpt") {
      const RoutingSolution solution = solve_mptpt(topo, commodities, class_specs);
      status = to_string(solution.status);
      if (solution.status == PipelineStatus::Ok) {
        const RuleTable table = compile_rules(solution, topo);
        avg_all = avg_rule_count(table, topo, false);
        avg_used = avg_rule_count(table, topo, true);
        max_rules = max_rule_count(table);
      }
    } else {
      BaselineResult result;
      if (key.algorithm == "lp1") {
        result = solve_lp1_baseline(topo, commodities, class_specs);
        status = result.status == SolveStatus::Optimal      ? "ok"
                 : result.status == SolveStatus::Infeasible ? "infeasible"
                                                            : "numerical_failure";
      } else {
        result = greedy_shortest_path(topo, commodities, class_specs);
        status = result.fully_routed() ? "ok" : "partial";
      }
      if (!result.rule_counts.empty()) {
        long total = 0;
        int used = 0;
        for (int v : topo.switch_list) {
          total += result.rule_counts[v];
          if (result.rule_counts[v] > 0) ++used;
          max_rules = std::max(max_rules, result.rule_counts[v]);
        }
        avg_all = static_cast<double>(total) / topo.switch_count();
        avg_used = used == 0 ? 0.0 : static_cast<double>(total) / used;
      }
    }

    std::ostringstream out;
    out << key.algorithm << ',' << label << ',' << key.classes << ',' << key.commodities << ','
        << key.seed << ',' << fmt(avg_all) << ',' << fmt(avg_used) << ',' << max_rules << ','
        << bound << ',' << status;
    return out.str();
  };

  std::string csv =
      "algorithm,topology,classes,commodities,seed,avg_rules_all,avg_rules_used,max_rules,"
      "bound,status\n";
  for (const std::string& r : run_rows(static_cast<int>(keys.size()), row)) csv += r + "\n";
  return csv;
}

namespace {

/// Does `algorithm` fully route the instance when every demand is `x`?
bool probe(const std::string& algorithm, const Topology& topo,
           std::vector<Commodity> commodities, const std::vector<ClassSpec>& class_specs,
           double x) {
  for (Commodity& c : commodities) c.demand = x;
  if (algorithm == "lp1") {
    SimplexOptions options;
    options.feasibility_only = true;
    const Lp1Model model = build_lp1_relaxed(topo, commodities, class_specs);
    return simplex_solve(model.lp, options).status == SolveStatus::Optimal;
  }
  if (algorithm == "mptpt")
    return solve_mptpt(topo, commodities, class_specs).status == PipelineStatus::Ok;
  return greedy_shortest_path(topo, commodities, class_specs).fully_routed();
}

}  // namespace

std::string experiment2(const ExperimentConfig& config) {
  validate_config(config);
  const Topology topo = topology_from_selector(config.topology);
  const std::string label = topology_label(config.topology);
  const std::vector<RowKey> keys = enumerate_rows(config);

  const auto row = [&](int idx) {
    const RowKey& key = keys[idx];
    std::ostringstream out;
    out << key.algorithm << ',' << label << ',' << key.classes << ',' << key.commodities << ','
        << key.seed << ',';
    if (key.commodities == 0) {
      out << "inf,unbounded";
      return out.str();
    }
    const auto commodities =
        gen_random_commodities(topo, key.commodities, key.classes, 1.0, key.seed);
    const auto class_specs = classes_for(topo, key.classes);

    // Climb in `step` increments to bracket the breaking point, then bisect.
    double lo = 0.0, hi = -1.0;
    for (long i = 1; i <= 1000000; ++i) {
      const double x = config.step * static_cast<double>(i);
      if (probe(key.algorithm, topo, commodities, class_specs, x)) {
        lo = x;
      } else {
        hi = x;
        break;
      }
    }
    if (hi < 0.0) throw std::logic_error("experiment2: no finite breaking point found");
    while (hi - lo > config.tolerance) {
      const double mid = 0.5 * (lo + hi);
      (probe(key.algorithm, topo, commodities, class_specs, mid) ? lo : hi) = mid;
    }
    out << fmt(lo) << ",ok";
    return out.str();
  };

  std::string csv = "algorithm,topology,classes,commodities,seed,max_uniform_demand,status\n";
  for (const std::string& r : run_rows(static_cast<int>(keys.size()), row)) csv += r + "\n";
  return csv;
}

}  // namespace mptpt
