#pragma once

#include <map>
#include <string>
#include <vector>

#include "mptpt/simplex.hpp"
#include "mptpt/topology.hpp"
#include "mptpt/transform.hpp"

namespace mptpt {

/// Tree expressed over topology nodes. Step-1 trees root at a class sink:
/// every PM-attached switch that couples into the sink carries a parent edge
/// into its PM, so the "tree" is a forest of switch paths ending at PMs, all
/// answering to one tag. Step-2 trees root at a destination switch.
struct RoutedTree {
  int tag = 0;
  int root_class = 0;    // step-1 trees: class id; 0 for step-2 trees
  int root_switch = -1;  // step-2 trees: topology node; -1 for step-1 trees
  std::map<int, int> parent;             // topology node -> topology edge toward root
  std::map<int, double> source_amounts;  // topology node -> amount entering here

  bool is_step1() const { return root_class > 0; }
};

/// One slice of a commodity's demand: `amount` rides the step-1 tree with
/// tag `step1_tag` to a PM, then the step-2 tree with tag `step2_tag` home.
struct SharePair {
  int step1_tag = 0;
  int step2_tag = 0;
  double amount = 0.0;
};

enum class PipelineStatus { Ok, Step1Infeasible, Step2Infeasible, NumericalFailure };

const char* to_string(PipelineStatus status);

struct SolveStats {
  double step1_objective = 0.0;
  double step2_objective = 0.0;
  long step1_iterations = 0;
  long step2_iterations = 0;
  double step1_solve_ms = 0.0;
  double step2_solve_ms = 0.0;
  int bound = 0;
};

struct RoutingSolution {
  PipelineStatus status = PipelineStatus::NumericalFailure;
  std::string failing_stage;  // empty when Ok
  int num_classes = 0;
  std::vector<RoutedTree> step1_trees;
  std::vector<RoutedTree> step2_trees;
  std::vector<std::vector<SharePair>> commodity_shares;  // indexed like commodities
  SolveStats stats;

  int total_trees() const {
    return static_cast<int>(step1_trees.size() + step2_trees.size());
  }
};

/// Two-step tree routing: route (source, class) groups to per-class sinks,
/// peel into trees, derive PM-exit demands, route those to the destinations
/// over the leftover capacity, peel again, then slice every commodity's
/// demand over its (step-1 tree, step-2 tree) pairs.
RoutingSolution solve_mptpt(const Topology& topo, const std::vector<Commodity>& commodities,
                            const std::vector<ClassSpec>& classes,
                            const SimplexOptions& options = {});

/// Worst-case total tree count: C + 2|E0| + |V_T| - 2|V_pm|, where |V_T|
/// counts distinct destinations (all switches when commodities are unknown).
int theorem1_bound(const Topology& topo, int num_classes,
                   const std::vector<Commodity>& commodities = {});

/// Stable-field-order JSON dump of a tree-form solution and its inverse.
std::string solution_to_json(const RoutingSolution& solution, const Topology& topo);
RoutingSolution solution_from_json(const std::string& text, const Topology& topo);

}  // namespace mptpt
