#pragma once

#include <vector>

namespace mptpt {

/// Edge of a per-step routing graph. Switch-switch edges keep a back-reference
/// to the topology edge they came from; sink-coupling edges remember which
/// switch and class they stand for instead.
struct StepEdge {
  int from = -1;
  int to = -1;
  double capacity = 0.0;
  int topo_edge = -1;        // originating topology edge, -1 for coupling edges
  int coupling_switch = -1;  // topology node of the PM-attached switch, -1 otherwise
  int coupling_class = 0;    // class id k for (v, P_k) edges, 0 otherwise
};

/// Routing graph for one step. Nodes [0, num_switches) are the topology's
/// switches in switch_list order; any further nodes are per-class sinks.
struct StepGraph {
  int num_nodes = 0;
  int num_switches = 0;
  std::vector<StepEdge> edges;
  std::vector<int> class_sinks;  // node id of P_k at index k-1; empty for step 2
  std::vector<std::vector<int>> out_edges;
  std::vector<std::vector<int>> in_edges;

  int edge_count() const { return static_cast<int>(edges.size()); }
  bool is_sink(int node) const { return node >= num_switches; }
  void build_adjacency();
};

/// One aggregated demand: `amount` must travel from `node` to `sink`.
struct StepDemand {
  int node = -1;
  int sink = -1;
  double amount = 0.0;
};

}  // namespace mptpt
