#include "mptpt/transform.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace mptpt {

void StepGraph::build_adjacency() {
  out_edges.assign(num_nodes, {});
  in_edges.assign(num_nodes, {});
  for (int e = 0; e < edge_count(); ++e) {
    out_edges[edges[e].from].push_back(e);
    in_edges[edges[e].to].push_back(e);
  }
}

StepGraph build_g1(const Topology& topo, int num_classes) {
  if (num_classes < 1) throw std::invalid_argument("build_g1: need at least one class");
  StepGraph g;
  g.num_switches = topo.switch_count();
  g.num_nodes = g.num_switches + num_classes;
  for (int k = 1; k <= num_classes; ++k) g.class_sinks.push_back(g.num_switches + k - 1);

  for (int e : topo.switch_switch_edges) {
    const Edge& ed = topo.edges[e];
    g.edges.push_back({topo.switch_ord[ed.from], topo.switch_ord[ed.to], ed.capacity, e, -1, 0});
  }
  for (int v : topo.switch_list) {
    if (topo.attached_pm[v] < 0) continue;
    for (int k = 1; k <= num_classes; ++k)
      g.edges.push_back({topo.switch_ord[v], g.class_sinks[k - 1], kUnlimited, -1, v, k});
  }
  g.build_adjacency();
  return g;
}

std::vector<StepDemand> step1_demands(const StepGraph& g1,
                                      const std::vector<Commodity>& commodities,
                                      const Topology& topo) {
  const int num_classes = static_cast<int>(g1.class_sinks.size());
  std::map<std::pair<int, int>, double> grouped;  // (source ordinal, class) -> demand
  for (const Commodity& c : commodities) {
    if (c.class_id < 1 || c.class_id > num_classes)
      throw std::invalid_argument("step1_demands: commodity class " +
                                  std::to_string(c.class_id) + " outside 1.." +
                                  std::to_string(num_classes));
    grouped[{topo.switch_ord[c.source], c.class_id}] += c.demand;
  }
  std::vector<StepDemand> result;
  result.reserve(grouped.size());
  for (const auto& [key, amount] : grouped)
    result.push_back({key.first, g1.class_sinks[key.second - 1], amount});
  return result;
}

StepGraph build_g2(const Topology& topo, const StepGraph& g1,
                   const std::vector<std::vector<double>>& step1_flow_by_class) {
  StepGraph g;
  g.num_switches = topo.switch_count();
  g.num_nodes = g.num_switches;

  const int num_switch_edges = static_cast<int>(topo.switch_switch_edges.size());
  for (int i = 0; i < num_switch_edges; ++i) {
    const StepEdge& g1_edge = g1.edges[i];  // g1 lists switch-switch edges first, same order
    double used = 0.0;
    for (const auto& flow : step1_flow_by_class) used += flow[i];
    double residual = g1_edge.capacity - used;
    if (residual < -1e-6)
      throw std::runtime_error("build_g2: step-1 flow exceeds capacity on edge " +
                               std::to_string(i) + " by " + std::to_string(-residual));
    g.edges.push_back({g1_edge.from, g1_edge.to, std::max(residual, 0.0),
                       g1_edge.topo_edge, -1, 0});
  }
  g.build_adjacency();
  return g;
}

std::vector<std::vector<double>> distribute_by_destination(
    const std::vector<double>& tree_amounts, const std::vector<double>& dest_demands) {
  if (dest_demands.empty())
    throw std::invalid_argument("distribute_by_destination: no destinations");
  double total = 0.0;
  for (double d : dest_demands) {
    if (d < 0.0) throw std::invalid_argument("distribute_by_destination: negative demand");
    total += d;
  }
  if (!(total > 0.0))
    throw std::invalid_argument("distribute_by_destination: zero total demand");

  std::vector<std::vector<double>> shares(tree_amounts.size());
  for (std::size_t i = 0; i < tree_amounts.size(); ++i) {
    shares[i].reserve(dest_demands.size());
    for (double d : dest_demands) shares[i].push_back(tree_amounts[i] * (d / total));
  }
  return shares;
}

std::vector<GroupRouting> group_step1_usage(const StepGraph& g1,
                                            const std::vector<MptpTree>& step1_trees,
                                            const std::vector<Commodity>& commodities,
                                            const Topology& topo) {
  std::map<std::pair<int, int>, GroupRouting> grouped;  // (source node, class)
  for (int i = 0; i < static_cast<int>(commodities.size()); ++i) {
    const Commodity& c = commodities[i];
    GroupRouting& g = grouped[{c.source, c.class_id}];
    g.source = c.source;
    g.class_id = c.class_id;
    g.total_demand += c.demand;
    g.commodity_ids.push_back(i);
  }

  const int num_classes = static_cast<int>(g1.class_sinks.size());
  for (int t = 0; t < static_cast<int>(step1_trees.size()); ++t) {
    const MptpTree& tree = step1_trees[t];
    const int class_id = tree.root - g1.num_switches + 1;
    if (class_id < 1 || class_id > num_classes)
      throw std::invalid_argument("group_step1_usage: tree not rooted at a class sink");
    for (const auto& [source_node, amount] : tree.source_amounts) {
      auto it = grouped.find({topo.switch_list[source_node], class_id});
      if (it == grouped.end())
        throw std::runtime_error("group_step1_usage: tree moves demand of an unknown group");
      it->second.uses.push_back(
          {t, source_node, tree_entry_node(tree, g1, source_node), amount});
    }
  }

  std::vector<GroupRouting> result;
  result.reserve(grouped.size());
  for (auto& [key, g] : grouped) result.push_back(std::move(g));
  return result;
}

std::vector<StepDemand> step2_demands(const StepGraph& g2,
                                      const std::vector<MptpTree>& step1_trees,
                                      const StepGraph& g1,
                                      const std::vector<Commodity>& commodities,
                                      const Topology& topo) {
  const auto groups = group_step1_usage(g1, step1_trees, commodities, topo);

  std::map<std::pair<int, int>, double> demand;  // (sink ordinal, node ordinal) -> amount
  double total_in = 0.0;
  for (const GroupRouting& group : groups) {
    total_in += group.total_demand;
    // Destination demands of this group, ordered by destination ordinal.
    std::map<int, double> dests;
    for (int ci : group.commodity_ids)
      dests[topo.switch_ord[commodities[ci].dest]] += commodities[ci].demand;

    std::vector<double> amounts;
    amounts.reserve(group.uses.size());
    for (const Step1TreeUse& use : group.uses) amounts.push_back(use.amount);
    std::vector<double> dest_demands;
    dest_demands.reserve(dests.size());
    for (const auto& [dest, d] : dests) dest_demands.push_back(d);

    const auto shares = distribute_by_destination(amounts, dest_demands);
    for (std::size_t u = 0; u < group.uses.size(); ++u) {
      std::size_t j = 0;
      for (const auto& [dest, d] : dests)
        demand[{dest, group.uses[u].entry_node}] += shares[u][j++];
    }
  }

  std::vector<StepDemand> result;
  double total_out = 0.0;
  for (const auto& [key, amount] : demand) {
    if (key.first < 0 || key.first >= g2.num_switches || key.second < 0 ||
        key.second >= g2.num_switches)
      throw std::logic_error("step2_demands: demand endpoint outside the target graph");
    result.push_back({key.second, key.first, amount});
    total_out += amount;
  }
  const double drift = std::fabs(total_out - total_in);
  if (drift > 1e-9 && drift > 1e-6 * std::max(total_in, total_out))
    throw std::logic_error("step2_demands: mass not preserved (in " +
                           std::to_string(total_in) + ", out " + std::to_string(total_out) + ")");
  return result;
}

}  // namespace mptpt
