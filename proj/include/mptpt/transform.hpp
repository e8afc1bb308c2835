#pragma once

#include <vector>

#include "mptpt/step_graph.hpp"
#include "mptpt/topology.hpp"
#include "mptpt/trees.hpp"

namespace mptpt {

/// Step-1 graph: switches plus one sink P_k per class; every PM-attached
/// switch couples into every sink with an uncapacitated edge (the physical
/// PM limits enter the step-1 program as side constraints instead).
/// |E1| = |E0| + |V_pm| * (C - 2).
StepGraph build_g1(const Topology& topo, int num_classes);

/// Aggregates commodities into per-(source, class) step-1 demands, one entry
/// per group, ordered by (source, class).
std::vector<StepDemand> step1_demands(const StepGraph& g1,
                                      const std::vector<Commodity>& commodities,
                                      const Topology& topo);

/// Step-2 graph: switches only, switch-switch edges with the capacity that
/// step 1 left behind. Throws if any residual is below -1e-6 (corrupt step-1
/// flow); small negatives are clamped to zero. |E2| = |E0| - 2|V_pm|.
StepGraph build_g2(const Topology& topo, const StepGraph& g1,
                   const std::vector<std::vector<double>>& step1_flow_by_class);

/// Splits per-tree amounts of one (source, class) group over the group's
/// destinations proportionally to destination demand:
/// share[i][j] = tree_amounts[i] * dest_demands[j] / sum(dest_demands).
std::vector<std::vector<double>> distribute_by_destination(
    const std::vector<double>& tree_amounts, const std::vector<double>& dest_demands);

/// How one (source, class) group rides one step-1 tree.
struct Step1TreeUse {
  int tree_index = -1;   // into the step-1 tree list
  int source_node = -1;  // switch ordinal of the group's source
  int entry_node = -1;   // switch ordinal that couples into the sink
  double amount = 0.0;
};

/// Step-1 usage of one (source, class) commodity group.
struct GroupRouting {
  int source = -1;  // topology node
  int class_id = 0;
  double total_demand = 0.0;
  std::vector<int> commodity_ids;  // indices into the commodity list
  std::vector<Step1TreeUse> uses;
};

/// Collects, per (source, class) group, which step-1 trees move its demand,
/// how much each moves, and where each enters a PM. Ordered by (source, class).
std::vector<GroupRouting> group_step1_usage(const StepGraph& g1,
                                            const std::vector<MptpTree>& step1_trees,
                                            const std::vector<Commodity>& commodities,
                                            const Topology& topo);

/// Aggregated step-2 demands: for every group, tree and destination, the
/// destination-proportional share of the tree amount lands on the tree's PM
/// entry switch. Output ordered by (sink, node); total mass equals total
/// commodity demand (checked to 1e-9 abs / 1e-6 rel).
std::vector<StepDemand> step2_demands(const StepGraph& g2,
                                      const std::vector<MptpTree>& step1_trees,
                                      const StepGraph& g1,
                                      const std::vector<Commodity>& commodities,
                                      const Topology& topo);

}  // namespace mptpt
