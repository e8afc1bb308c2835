#include "mptpt/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "json.hpp"

namespace mptpt {

std::string VerificationReport::to_json() const {
  nlohmann::ordered_json j;
  j["pass"] = pass();
  j["tolerance"] = tolerance;
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const CheckResult& c : checks)
    list.push_back({{"name", c.name}, {"worst", c.worst}, {"pass", c.pass}});
  j["checks"] = std::move(list);
  return j.dump(2) + "\n";
}

std::vector<CommodityFlow> flows_from_trees(const RoutingSolution& solution,
                                            const Topology& topo,
                                            const std::vector<Commodity>& commodities) {
  std::map<int, const RoutedTree*> by_tag;
  for (const RoutedTree& t : solution.step1_trees) by_tag[t.tag] = &t;
  for (const RoutedTree& t : solution.step2_trees) by_tag[t.tag] = &t;

  std::vector<CommodityFlow> flows(commodities.size());
  for (auto& f : flows) {
    f.f0.assign(topo.edge_count(), 0.0);
    f.f1.assign(topo.edge_count(), 0.0);
  }
  if (solution.commodity_shares.size() > commodities.size())
    throw std::invalid_argument("flows_from_trees: more share lists than commodities");

  const int guard = static_cast<int>(topo.nodes.size()) + 2;
  for (std::size_t i = 0; i < solution.commodity_shares.size(); ++i) {
    for (const SharePair& share : solution.commodity_shares[i]) {
      auto it1 = by_tag.find(share.step1_tag);
      auto it2 = by_tag.find(share.step2_tag);
      if (it1 == by_tag.end() || !it1->second->is_step1())
        throw std::invalid_argument("flows_from_trees: share references no step-1 tree");
      if (it2 == by_tag.end() || it2->second->is_step1())
        throw std::invalid_argument("flows_from_trees: share references no step-2 tree");
      const RoutedTree& t1 = *it1->second;
      const RoutedTree& t2 = *it2->second;

      // Into the PM along the step-1 tree...
      int u = commodities[i].source;
      int pm = -1;
      for (int hops = 0; hops <= guard; ++hops) {
        auto p = t1.parent.find(u);
        if (p == t1.parent.end()) {
          if (!topo.is_pm(u))
            throw std::invalid_argument("flows_from_trees: step-1 walk stops before a PM");
          pm = u;
          break;
        }
        flows[i].f0[p->second] += share.amount;
        u = topo.edges[p->second].to;
      }
      if (pm < 0) throw std::invalid_argument("flows_from_trees: step-1 walk loops");

      // ...back out and home along the step-2 tree.
      flows[i].f1[topo.pm_out_edge[pm]] += share.amount;
      u = topo.attached_switch[pm];
      for (int hops = 0; u != t2.root_switch; ++hops) {
        if (hops > guard) throw std::invalid_argument("flows_from_trees: step-2 walk loops");
        auto p = t2.parent.find(u);
        if (p == t2.parent.end())
          throw std::invalid_argument(
              "flows_from_trees: PM switch is not on the share's step-2 tree");
        flows[i].f1[p->second] += share.amount;
        u = topo.edges[p->second].to;
      }
    }
  }
  return flows;
}

std::vector<CommodityFlow> flows_from_paths(const std::vector<CommodityPath>& paths,
                                            const Topology& topo,
                                            std::size_t num_commodities) {
  std::vector<CommodityFlow> flows(num_commodities);
  for (auto& f : flows) {
    f.f0.assign(topo.edge_count(), 0.0);
    f.f1.assign(topo.edge_count(), 0.0);
  }
  for (const CommodityPath& path : paths) {
    if (path.commodity < 0 || path.commodity >= static_cast<int>(num_commodities))
      throw std::invalid_argument("flows_from_paths: path names an unknown commodity");
    bool processed = false;
    for (std::size_t k = 0; k + 1 < path.nodes.size(); ++k) {
      const int e = topo.find_edge(path.nodes[k], path.nodes[k + 1]);
      if (e < 0)
        throw std::invalid_argument("flows_from_paths: path uses a nonexistent link " +
                                    topo.nodes.at(path.nodes[k]).id + "->" +
                                    topo.nodes.at(path.nodes[k + 1]).id);
      auto& f = flows[path.commodity];
      (processed ? f.f1 : f.f0)[e] += path.amount;
      if (topo.is_pm(path.nodes[k + 1])) processed = true;
    }
  }
  return flows;
}

VerificationReport verify_routing(const Topology& topo,
                                  const std::vector<Commodity>& commodities,
                                  const std::vector<ClassSpec>& classes,
                                  const std::vector<CommodityFlow>& flows,
                                  double tolerance) {
  if (flows.size() != commodities.size())
    throw std::invalid_argument("verify_routing: one flow per commodity required");
  for (const CommodityFlow& f : flows)
    if (static_cast<int>(f.f0.size()) != topo.edge_count() ||
        static_cast<int>(f.f1.size()) != topo.edge_count())
      throw std::invalid_argument("verify_routing: flow vector size mismatch");

  VerificationReport report;
  report.tolerance = tolerance;
  const auto add = [&](const std::string& name, double worst) {
    report.checks.push_back({name, worst, worst <= tolerance});
  };

  // Nonnegativity.
  double worst_neg = 0.0;
  for (const CommodityFlow& f : flows) {
    for (double v : f.f0) worst_neg = std::max(worst_neg, -v);
    for (double v : f.f1) worst_neg = std::max(worst_neg, -v);
  }
  add("nonnegativity", worst_neg);

  // Conservation: unprocessed flow balances at every switch except that the
  // demand enters at the source; processed flow balances everywhere but the
  // destination. PM nodes are covered by the coupling checks below.
  double worst_cons = 0.0;
  for (std::size_t i = 0; i < flows.size(); ++i) {
    const Commodity& c = commodities[i];
    for (int v : topo.switch_list) {
      double net0 = 0.0, net1 = 0.0;
      for (int e : topo.out_edges[v]) {
        net0 += flows[i].f0[e];
        net1 += flows[i].f1[e];
      }
      for (int e : topo.in_edges[v]) {
        net0 -= flows[i].f0[e];
        net1 -= flows[i].f1[e];
      }
      worst_cons = std::max(worst_cons, std::fabs(net0 - (v == c.source ? c.demand : 0.0)));
      if (v != c.dest) worst_cons = std::max(worst_cons, std::fabs(net1));
    }
  }
  add("conservation", worst_cons);

  // Joint link load against capacity.
  double worst_link = 0.0;
  for (int e = 0; e < topo.edge_count(); ++e) {
    double load = 0.0;
    for (const CommodityFlow& f : flows) load += f.f0[e] + f.f1[e];
    worst_link = std::max(worst_link, load - topo.edges[e].capacity);
  }
  add("link_capacity", worst_link);

  // PM budgets under per-class costs.
  double worst_pm = 0.0;
  for (int pm : topo.pm_list) {
    double load = 0.0;
    for (std::size_t i = 0; i < flows.size(); ++i)
      load += classes.at(commodities[i].class_id - 1).unit_cost *
              flows[i].f0[topo.pm_in_edge[pm]];
    worst_pm = std::max(worst_pm, load - topo.nodes[pm].pm_capacity);
  }
  add("pm_capacity", worst_pm);

  // Processed exactly once: each commodity's whole demand enters some PM
  // unprocessed, and nothing already processed comes back for more.
  double worst_once = 0.0;
  for (std::size_t i = 0; i < flows.size(); ++i) {
    double entered = 0.0;
    for (int pm : topo.pm_list) {
      entered += flows[i].f0[topo.pm_in_edge[pm]];
      worst_once = std::max(worst_once, flows[i].f1[topo.pm_in_edge[pm]]);
    }
    worst_once = std::max(worst_once, std::fabs(entered - commodities[i].demand));
  }
  add("process_exactly_once", worst_once);

  // Per-(PM, commodity) VM coupling: unprocessed in equals processed out.
  double worst_class = 0.0;
  for (std::size_t i = 0; i < flows.size(); ++i)
    for (int pm : topo.pm_list)
      worst_class = std::max(worst_class, std::fabs(flows[i].f0[topo.pm_in_edge[pm]] -
                                                    flows[i].f1[topo.pm_out_edge[pm]]));
  add("class_correctness", worst_class);

  // Full delivery: the processed flow drains the demand at the destination.
  double worst_demand = 0.0;
  for (std::size_t i = 0; i < flows.size(); ++i) {
    const Commodity& c = commodities[i];
    double net_in = 0.0;
    for (int e : topo.in_edges[c.dest]) net_in += flows[i].f1[e];
    for (int e : topo.out_edges[c.dest]) net_in -= flows[i].f1[e];
    worst_demand = std::max(worst_demand, std::fabs(net_in - c.demand));
  }
  add("demand_satisfaction", worst_demand);

  return report;
}

}  // namespace mptpt
