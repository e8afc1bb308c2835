#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mptpt/topology.hpp"

namespace mptpt {

/// One sweep description. `topology` accepts fig1 | geant | fattree |
/// file:<path>. Every run is generated from (count, classes, seed), so a
/// rerun of the same config reproduces the same CSV bytes.
struct ExperimentConfig {
  std::string topology = "fig1";
  std::vector<int> classes = {3, 7};
  std::vector<int> commodity_counts = {10, 25, 50, 100};
  double demand = 0.2;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<std::string> algorithms = {"mptpt", "lp1", "greedy"};
  double step = 0.1;       // throughput search: coarse increment
  double tolerance = 1e-3; // throughput search: bisection width
};

ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);
std::string experiment_config_to_json(const ExperimentConfig& config);

/// Throws std::invalid_argument on empty sweep lists, a nonpositive step or
/// demand, or an unknown algorithm name.
void validate_config(const ExperimentConfig& config);

/// Resolves a topology selector. `data_dir` overrides the compiled-in data
/// directory used for the named fixtures (geant).
Topology topology_from_selector(const std::string& selector, const std::string& data_dir = "");

/// Rule-count comparison. One row per (classes, commodities, seed, algorithm):
/// mean rules over all switches, mean over switches holding rules, the
/// per-switch maximum, and the worst-case tree bound for that instance.
/// CSV header:
/// algorithm,topology,classes,commodities,seed,avg_rules_all,avg_rules_used,max_rules,bound,status
std::string experiment1(const ExperimentConfig& config);

/// Throughput comparison. For each (classes, commodities, seed, algorithm),
/// the largest uniform per-commodity demand the scheme still fully routes:
/// raised by `step` until it breaks, then bisected to `tolerance`. The
/// one-shot program is probed for feasibility only (its phase-1 verdict is
/// the answer). CSV header:
/// algorithm,topology,classes,commodities,seed,max_uniform_demand,status
std::string experiment2(const ExperimentConfig& config);

}  // namespace mptpt
