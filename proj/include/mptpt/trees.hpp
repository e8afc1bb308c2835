#pragma once

#include <map>
#include <vector>

#include "mptpt/step_graph.hpp"

namespace mptpt {

/// Multipoint-to-point tree: every node routes toward a single root over its
/// parent edge. source_amounts records how much each source moves on this tree.
/// parent_edge holds exactly the nodes on some active source's path.
struct MptpTree {
  int root = -1;
  std::map<int, int> parent_edge;       // node -> graph edge toward the root
  std::map<int, double> source_amounts;
  int tag = 0;                          // assigned when a routing is assembled

  bool contains(int node) const { return node == root || parent_edge.count(node) > 0; }
};

/// Peels a per-destination flow into trees: repeatedly grow a tree over
/// positive-flow edges spanning every source that still has demand, move the
/// largest uniformly-scaled amount the tree supports, subtract, repeat.
/// Requires `flow` to deliver `demands` exactly (LP output does); throws
/// std::runtime_error when it does not.
std::vector<MptpTree> flow_to_trees(const StepGraph& graph, int root,
                                    std::vector<double> flow,
                                    std::map<int, double> demands);

/// Cancels directed cycles in the positive support of a per-destination flow.
/// Pure defence: a minimum-total-flow optimum is already acyclic. Divergence
/// at every node is preserved.
std::vector<double> remove_cycles(const StepGraph& graph, std::vector<double> flow);

/// Nodes of `source`'s path to the root, source first, root excluded.
std::vector<int> tree_path_nodes(const MptpTree& tree, const StepGraph& graph, int source);

/// Last switch on `source`'s path before a sink root (the PM entry point).
/// For step-2 trees (switch root) returns the root itself.
int tree_entry_node(const MptpTree& tree, const StepGraph& graph, int source);

}  // namespace mptpt
