#include "mptpt/lp_builders.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

namespace mptpt {

namespace {

double class_cost(const std::vector<ClassSpec>& classes, int class_id) {
  for (const ClassSpec& c : classes)
    if (c.id == class_id) return c.unit_cost;
  throw std::invalid_argument("unknown class id " + std::to_string(class_id));
}

}  // namespace

Lp1Model build_lp1_relaxed(const Topology& topo, const std::vector<Commodity>& commodities,
                           const std::vector<ClassSpec>& classes) {
  Lp1Model model;
  model.num_commodities = static_cast<int>(commodities.size());
  model.num_edges = topo.edge_count();
  LpModel& lp = model.lp;
  lp.num_vars = 2 * model.num_commodities * model.num_edges;
  lp.objective.assign(lp.num_vars, 1.0);

  // Unprocessed conservation: net outflow at every switch equals the demand
  // injected there (the full demand at the source, zero elsewhere).
  for (int i = 0; i < model.num_commodities; ++i) {
    for (int v : topo.switch_list) {
      LpRow row;
      row.sense = RowSense::Equal;
      row.rhs = v == commodities[i].source ? commodities[i].demand : 0.0;
      for (int e : topo.out_edges[v]) row.coefs.push_back({model.var(0, i, e), 1.0});
      for (int e : topo.in_edges[v]) row.coefs.push_back({model.var(0, i, e), -1.0});
      row.name = "u_cons[i" + std::to_string(i) + "," + topo.nodes[v].id + "]";
      lp.rows.push_back(std::move(row));
    }
  }
  // Processed conservation at every switch but the destination.
  for (int i = 0; i < model.num_commodities; ++i) {
    for (int v : topo.switch_list) {
      if (v == commodities[i].dest) continue;
      LpRow row;
      row.sense = RowSense::Equal;
      row.rhs = 0.0;
      for (int e : topo.out_edges[v]) row.coefs.push_back({model.var(1, i, e), 1.0});
      for (int e : topo.in_edges[v]) row.coefs.push_back({model.var(1, i, e), -1.0});
      row.name = "p_cons[i" + std::to_string(i) + "," + topo.nodes[v].id + "]";
      lp.rows.push_back(std::move(row));
    }
  }
  // Processed flow may not re-enter a PM.
  for (int pm : topo.pm_list) {
    for (int i = 0; i < model.num_commodities; ++i) {
      LpRow row;
      row.sense = RowSense::Equal;
      row.rhs = 0.0;
      row.coefs.push_back({model.var(1, i, topo.pm_in_edge[pm]), 1.0});
      row.name = "no_reproc[i" + std::to_string(i) + "," + topo.nodes[pm].id + "]";
      lp.rows.push_back(std::move(row));
    }
  }
  // What enters a PM unprocessed leaves it processed.
  for (int pm : topo.pm_list) {
    for (int i = 0; i < model.num_commodities; ++i) {
      LpRow row;
      row.sense = RowSense::Equal;
      row.rhs = 0.0;
      row.coefs.push_back({model.var(0, i, topo.pm_in_edge[pm]), 1.0});
      row.coefs.push_back({model.var(1, i, topo.pm_out_edge[pm]), -1.0});
      row.name = "process[i" + std::to_string(i) + "," + topo.nodes[pm].id + "]";
      lp.rows.push_back(std::move(row));
    }
  }
  // PM processing budget, weighted by class cost.
  for (int pm : topo.pm_list) {
    LpRow row;
    row.sense = RowSense::LessEqual;
    row.rhs = topo.nodes[pm].pm_capacity;
    row.bundle = true;
    for (int i = 0; i < model.num_commodities; ++i)
      row.coefs.push_back({model.var(0, i, topo.pm_in_edge[pm]),
                           class_cost(classes, commodities[i].class_id)});
    row.name = "pm_budget[" + topo.nodes[pm].id + "]";
    lp.rows.push_back(std::move(row));
  }
  // Joint link capacity over both flavors of every commodity.
  for (int e = 0; e < model.num_edges; ++e) {
    LpRow row;
    row.sense = RowSense::LessEqual;
    row.rhs = topo.edges[e].capacity;
    row.bundle = true;
    for (int i = 0; i < model.num_commodities; ++i) {
      row.coefs.push_back({model.var(0, i, e), 1.0});
      row.coefs.push_back({model.var(1, i, e), 1.0});
    }
    row.name = "cap[e" + std::to_string(e) + "]";
    lp.rows.push_back(std::move(row));
  }
  return model;
}

Lp2Model build_lp2(const StepGraph& g1, const std::vector<StepDemand>& demands,
                   const std::vector<ClassSpec>& classes, const Topology& topo) {
  Lp2Model model;
  model.num_classes = static_cast<int>(g1.class_sinks.size());
  model.num_edges = g1.edge_count();
  LpModel& lp = model.lp;
  lp.num_vars = model.num_classes * model.num_edges;
  lp.objective.assign(lp.num_vars, 1.0);

  std::map<std::pair<int, int>, double> demand;  // (node, sink) -> amount
  for (const StepDemand& d : demands) demand[{d.node, d.sink}] += d.amount;

  // Conservation per sink at every other node; sinks of other classes sit in
  // these rows too, which pins their coupling variables to zero.
  for (int k = 1; k <= model.num_classes; ++k) {
    const int sink = g1.class_sinks[k - 1];
    for (int v = 0; v < g1.num_nodes; ++v) {
      if (v == sink) continue;
      LpRow row;
      row.sense = RowSense::Equal;
      auto it = demand.find({v, sink});
      row.rhs = it == demand.end() ? 0.0 : it->second;
      for (int e : g1.out_edges[v]) row.coefs.push_back({model.var(k, e), 1.0});
      for (int e : g1.in_edges[v]) row.coefs.push_back({model.var(k, e), -1.0});
      row.name = "cons[P" + std::to_string(k) + ",n" + std::to_string(v) + "]";
      lp.rows.push_back(std::move(row));
    }
  }
  // Shared switch-switch capacity across all sinks.
  for (int e = 0; e < model.num_edges; ++e) {
    if (g1.edges[e].topo_edge < 0) continue;
    LpRow row;
    row.sense = RowSense::LessEqual;
    row.rhs = g1.edges[e].capacity;
    row.bundle = true;
    for (int k = 1; k <= model.num_classes; ++k) row.coefs.push_back({model.var(k, e), 1.0});
    row.name = "cap[e" + std::to_string(e) + "]";
    lp.rows.push_back(std::move(row));
  }
  // Per PM-attached switch: coupling edges share the physical PM link ...
  std::map<int, std::vector<std::pair<int, int>>> couplings;  // topo switch -> [(k, edge)]
  for (int e = 0; e < model.num_edges; ++e)
    if (g1.edges[e].coupling_switch >= 0)
      couplings[g1.edges[e].coupling_switch].push_back({g1.edges[e].coupling_class, e});
  for (const auto& [v, edges_of_v] : couplings) {
    const int pm = topo.attached_pm[v];
    const double link_cap = std::min(topo.edges[topo.pm_in_edge[pm]].capacity,
                                     topo.edges[topo.pm_out_edge[pm]].capacity);
    LpRow row;
    row.sense = RowSense::LessEqual;
    row.rhs = link_cap;
    row.bundle = true;
    for (const auto& [k, e] : edges_of_v) row.coefs.push_back({model.var(k, e), 1.0});
    row.name = "pm_link[" + topo.nodes[v].id + "]";
    lp.rows.push_back(std::move(row));
  }
  // ... and the PM's processing budget, weighted by class cost.
  for (const auto& [v, edges_of_v] : couplings) {
    const int pm = topo.attached_pm[v];
    LpRow row;
    row.sense = RowSense::LessEqual;
    row.rhs = topo.nodes[pm].pm_capacity;
    row.bundle = true;
    for (const auto& [k, e] : edges_of_v)
      row.coefs.push_back({model.var(k, e), class_cost(classes, k)});
    row.name = "pm_budget[" + topo.nodes[v].id + "]";
    lp.rows.push_back(std::move(row));
  }
  return model;
}

Lp3Model build_lp3(const StepGraph& g2, const std::vector<StepDemand>& demands) {
  Lp3Model model;
  model.num_edges = g2.edge_count();

  std::set<int> dest_set;
  std::map<std::pair<int, int>, double> demand;  // (node, dest) -> amount
  for (const StepDemand& d : demands) {
    if (d.sink < 0 || d.sink >= g2.num_switches)
      throw std::invalid_argument("build_lp3: destination outside the switch graph");
    dest_set.insert(d.sink);
    if (d.node != d.sink) demand[{d.node, d.sink}] += d.amount;  // self-demand needs no flow
  }
  model.dests.assign(dest_set.begin(), dest_set.end());

  LpModel& lp = model.lp;
  lp.num_vars = static_cast<int>(model.dests.size()) * model.num_edges;
  lp.objective.assign(lp.num_vars, 1.0);

  for (int ti = 0; ti < static_cast<int>(model.dests.size()); ++ti) {
    const int dest = model.dests[ti];
    for (int v = 0; v < g2.num_nodes; ++v) {
      if (v == dest) continue;
      LpRow row;
      row.sense = RowSense::Equal;
      auto it = demand.find({v, dest});
      row.rhs = it == demand.end() ? 0.0 : it->second;
      for (int e : g2.out_edges[v]) row.coefs.push_back({model.var(ti, e), 1.0});
      for (int e : g2.in_edges[v]) row.coefs.push_back({model.var(ti, e), -1.0});
      row.name = "cons[t" + std::to_string(dest) + ",n" + std::to_string(v) + "]";
      lp.rows.push_back(std::move(row));
    }
  }
  for (int e = 0; e < model.num_edges; ++e) {
    LpRow row;
    row.sense = RowSense::LessEqual;
    row.rhs = g2.edges[e].capacity;
    row.bundle = true;
    for (int ti = 0; ti < static_cast<int>(model.dests.size()); ++ti)
      row.coefs.push_back({model.var(ti, e), 1.0});
    row.name = "cap[e" + std::to_string(e) + "]";
    lp.rows.push_back(std::move(row));
  }
  return model;
}

std::vector<std::vector<double>> lp2_flow_by_class(const Lp2Model& model,
                                                   const std::vector<double>& values) {
  std::vector<std::vector<double>> flow(model.num_classes,
                                        std::vector<double>(model.num_edges, 0.0));
  for (int k = 1; k <= model.num_classes; ++k)
    for (int e = 0; e < model.num_edges; ++e) flow[k - 1][e] = values[model.var(k, e)];
  return flow;
}

std::vector<std::vector<double>> lp3_flow_by_dest(const Lp3Model& model,
                                                  const std::vector<double>& values) {
  std::vector<std::vector<double>> flow(model.dests.size(),
                                        std::vector<double>(model.num_edges, 0.0));
  for (int ti = 0; ti < static_cast<int>(model.dests.size()); ++ti)
    for (int e = 0; e < model.num_edges; ++e) flow[ti][e] = values[model.var(ti, e)];
  return flow;
}

}  // namespace mptpt
