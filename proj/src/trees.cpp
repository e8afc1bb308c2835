#include "mptpt/trees.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>

namespace mptpt {

namespace {
constexpr double kEps = 1e-9;  // zero clamp for flows and residual demand
}

std::vector<int> tree_path_nodes(const MptpTree& tree, const StepGraph& graph, int source) {
  std::vector<int> nodes;
  int u = source;
  while (u != tree.root) {
    nodes.push_back(u);
    auto it = tree.parent_edge.find(u);
    if (it == tree.parent_edge.end())
      throw std::logic_error("tree_path_nodes: node " + std::to_string(u) +
                             " has no path to the root");
    u = graph.edges[it->second].to;
    if (static_cast<int>(nodes.size()) > graph.num_nodes)
      throw std::logic_error("tree_path_nodes: parent pointers form a loop");
  }
  return nodes;
}

int tree_entry_node(const MptpTree& tree, const StepGraph& graph, int source) {
  if (source == tree.root) return source;
  int u = source;
  for (int steps = 0; steps <= graph.num_nodes; ++steps) {
    auto it = tree.parent_edge.find(u);
    if (it == tree.parent_edge.end())
      throw std::logic_error("tree_entry_node: node " + std::to_string(u) +
                             " has no path to the root");
    const int next = graph.edges[it->second].to;
    if (next == tree.root) return u;
    u = next;
  }
  throw std::logic_error("tree_entry_node: parent pointers form a loop");
}

std::vector<MptpTree> flow_to_trees(const StepGraph& graph, int root,
                                    std::vector<double> flow,
                                    std::map<int, double> demands) {
  if (static_cast<int>(flow.size()) != graph.edge_count())
    throw std::invalid_argument("flow_to_trees: flow size mismatch");
  for (auto it = demands.begin(); it != demands.end();)
    it = it->second <= kEps ? demands.erase(it) : std::next(it);

  std::vector<MptpTree> trees;
  std::vector<int> parent(graph.num_nodes);
  std::vector<char> reached(graph.num_nodes);
  std::vector<double> load(graph.edge_count());
  long guard = graph.edge_count() + static_cast<long>(demands.size()) + 8;

  while (!demands.empty()) {
    if (--guard < 0)
      throw std::runtime_error("flow_to_trees: peeling did not converge");

    // Grow the tree by reverse BFS from the root over remaining flow; the
    // first edge that discovers a node becomes its parent (ties: lowest edge id).
    std::fill(parent.begin(), parent.end(), -1);
    std::fill(reached.begin(), reached.end(), 0);
    std::queue<int> frontier;
    reached[root] = 1;
    frontier.push(root);
    while (!frontier.empty()) {
      const int v = frontier.front();
      frontier.pop();
      for (int e : graph.in_edges[v]) {
        const int u = graph.edges[e].from;
        if (flow[e] > kEps && !reached[u]) {
          reached[u] = 1;
          parent[u] = e;
          frontier.push(u);
        }
      }
    }

    std::fill(load.begin(), load.end(), 0.0);
    for (const auto& [source, residual] : demands) {
      if (!reached[source])
        throw std::runtime_error("flow_to_trees: remaining flow does not reach source " +
                                 std::to_string(source));
      for (int u = source; u != root;) {
        const int e = parent[u];
        load[e] += residual;
        u = graph.edges[e].to;
      }
    }

    // Largest uniform scale the tree supports; each non-final peel drains the
    // binding edge to zero.
    double lambda = 1.0;
    for (int e = 0; e < graph.edge_count(); ++e)
      if (load[e] > 0.0) lambda = std::min(lambda, flow[e] / load[e]);
    lambda = std::max(lambda, 0.0);

    MptpTree tree;
    tree.root = root;
    for (auto it = demands.begin(); it != demands.end();) {
      const int source = it->first;
      const double amount = lambda >= 1.0 ? it->second : lambda * it->second;
      tree.source_amounts[source] = amount;
      for (int u = source; u != root;) {
        const int e = parent[u];
        tree.parent_edge[u] = e;
        u = graph.edges[e].to;
      }
      it->second -= amount;
      it = it->second <= kEps ? demands.erase(it) : std::next(it);
    }
    for (int e = 0; e < graph.edge_count(); ++e) {
      if (load[e] > 0.0) {
        flow[e] -= lambda * load[e];
        if (flow[e] <= kEps) flow[e] = 0.0;
      }
    }
    trees.push_back(std::move(tree));
  }
  return trees;
}

std::vector<double> remove_cycles(const StepGraph& graph, std::vector<double> flow) {
  if (static_cast<int>(flow.size()) != graph.edge_count())
    throw std::invalid_argument("remove_cycles: flow size mismatch");

  // Iterative DFS over positive-flow edges; each found cycle is cancelled by
  // its bottleneck, which zeroes at least one edge, so |E| rounds suffice.
  const int n = graph.num_nodes;
  std::vector<int> color(n), via_edge(n);
  std::vector<std::size_t> next_out(n);

  for (bool found_cycle = true; found_cycle;) {
    found_cycle = false;
    std::fill(color.begin(), color.end(), 0);  // 0 new, 1 on stack, 2 done
    for (int start = 0; start < n && !found_cycle; ++start) {
      if (color[start] != 0) continue;
      std::vector<int> stack{start};
      color[start] = 1;
      next_out[start] = 0;
      while (!stack.empty() && !found_cycle) {
        const int u = stack.back();
        bool descended = false;
        while (next_out[u] < graph.out_edges[u].size()) {
          const int e = graph.out_edges[u][next_out[u]++];
          if (flow[e] <= 1e-9) continue;
          const int w = graph.edges[e].to;
          if (color[w] == 1) {
            // Cycle: w ... u -> w. Collect it off the stack.
            std::vector<int> cycle{e};
            for (int i = static_cast<int>(stack.size()) - 1; stack[i] != w; --i)
              cycle.push_back(via_edge[stack[i]]);
            double bottleneck = flow[e];
            for (int ce : cycle) bottleneck = std::min(bottleneck, flow[ce]);
            for (int ce : cycle) {
              flow[ce] -= bottleneck;
              if (flow[ce] <= 1e-9) flow[ce] = 0.0;
            }
            found_cycle = true;
            break;
          }
          if (color[w] == 0) {
            color[w] = 1;
            via_edge[w] = e;
            next_out[w] = 0;
            stack.push_back(w);
            descended = true;
            break;
          }
        }
        if (found_cycle || descended) continue;
        color[u] = 2;
        stack.pop_back();
      }
    }
  }
  return flow;
}

}  // namespace mptpt
