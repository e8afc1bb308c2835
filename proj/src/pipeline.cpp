#include "mptpt/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <stdexcept>
#include <utility>

#include "json.hpp"
#include "mptpt/lp_builders.hpp"
#include "mptpt/trees.hpp"

namespace mptpt {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

/// Lift a step-1 graph tree (rooted at the class sink) onto topology nodes.
/// A coupling edge (v, P_k) becomes v's physical link into its PM.
RoutedTree lift_step1_tree(const MptpTree& tree, const StepGraph& g1, const Topology& topo,
                           int class_id) {
  RoutedTree out;
  out.root_class = class_id;
  for (const auto& [node, g1_edge] : tree.parent_edge) {
    const StepEdge& edge = g1.edges[g1_edge];
    const int topo_node = topo.switch_list[node];
    if (edge.topo_edge >= 0) {
      out.parent[topo_node] = edge.topo_edge;
    } else {
      const int pm = topo.attached_pm[edge.coupling_switch];
      out.parent[topo_node] = topo.pm_in_edge[pm];
    }
  }
  for (const auto& [node, amount] : tree.source_amounts)
    out.source_amounts[topo.switch_list[node]] = amount;
  return out;
}

RoutedTree lift_step2_tree(const MptpTree& tree, const StepGraph& g2, const Topology& topo) {
  RoutedTree out;
  out.root_switch = topo.switch_list[tree.root];
  for (const auto& [node, g2_edge] : tree.parent_edge)
    out.parent[topo.switch_list[node]] = g2.edges[g2_edge].topo_edge;
  for (const auto& [node, amount] : tree.source_amounts)
    out.source_amounts[topo.switch_list[node]] = amount;
  return out;
}

}  // namespace

const char* to_string(PipelineStatus status) {
  switch (status) {
    case PipelineStatus::Ok: return "ok";
    case PipelineStatus::Step1Infeasible: return "step1_infeasible";
    case PipelineStatus::Step2Infeasible: return "step2_infeasible";
    case PipelineStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

int theorem1_bound(const Topology& topo, int num_classes,
                   const std::vector<Commodity>& commodities) {
  int num_dests;
  if (commodities.empty()) {
    num_dests = topo.switch_count();
  } else {
    std::vector<int> dests;
    for (const Commodity& c : commodities) dests.push_back(c.dest);
    std::sort(dests.begin(), dests.end());
    num_dests = static_cast<int>(std::unique(dests.begin(), dests.end()) - dests.begin());
  }
  return num_classes + 2 * topo.edge_count() + num_dests - 2 * topo.pm_count();
}

RoutingSolution solve_mptpt(const Topology& topo, const std::vector<Commodity>& commodities,
                            const std::vector<ClassSpec>& classes,
                            const SimplexOptions& options) {
  const int num_classes = static_cast<int>(classes.size());

  RoutingSolution out;
  out.num_classes = num_classes;
  out.commodity_shares.resize(commodities.size());
  out.stats.bound = theorem1_bound(topo, num_classes, commodities);
  if (commodities.empty()) {
    out.status = PipelineStatus::Ok;
    return out;
  }

  // Step 1: route every (source, class) group to its class sink.
  const StepGraph g1 = build_g1(topo, num_classes);
  const std::vector<StepDemand> d1 = step1_demands(g1, commodities, topo);
  const Lp2Model lp2 = build_lp2(g1, d1, classes, topo);

  auto t0 = Clock::now();
  const BasicSolution sol1 = simplex_solve(lp2.lp, options);
  out.stats.step1_solve_ms = ms_since(t0);
  out.stats.step1_iterations = sol1.iterations;
  out.stats.step1_objective = sol1.objective;
  if (sol1.status == SolveStatus::Infeasible) {
    out.status = PipelineStatus::Step1Infeasible;
    out.failing_stage = "step1";
    return out;
  }
  std::string why;
  if (sol1.status != SolveStatus::Optimal || !check_basic_solution(lp2.lp, sol1, 1e-7, &why)) {
    out.status = PipelineStatus::NumericalFailure;
    out.failing_stage = "step1";
    return out;
  }

  // Peel each class's flow into trees; the cycle sweep is a no-op on
  // minimum-total-flow optima but keeps the peel safe on any vertex.
  std::vector<std::vector<double>> flow_by_class = lp2_flow_by_class(lp2, sol1.values);
  std::vector<MptpTree> step1_graph_trees;
  for (int k = 1; k <= num_classes; ++k) {
    flow_by_class[k - 1] = remove_cycles(g1, std::move(flow_by_class[k - 1]));
    std::map<int, double> demands;
    for (const StepDemand& d : d1)
      if (d.sink == g1.class_sinks[k - 1]) demands[d.node] += d.amount;
    if (demands.empty()) continue;
    for (MptpTree& t : flow_to_trees(g1, g1.class_sinks[k - 1], flow_by_class[k - 1], demands))
      step1_graph_trees.push_back(std::move(t));
  }
  for (int i = 0; i < static_cast<int>(step1_graph_trees.size()); ++i)
    step1_graph_trees[i].tag = i + 1;

  // Lift step 1 onto the topology now, so a step-2 failure still reports
  // which trees the first stage committed to.
  for (const MptpTree& t : step1_graph_trees) {
    RoutedTree lifted = lift_step1_tree(t, g1, topo, t.root - g1.num_switches + 1);
    lifted.tag = t.tag;
    out.step1_trees.push_back(std::move(lifted));
  }

  // Step 2: deliver the processed traffic over what step 1 left behind.
  const StepGraph g2 = build_g2(topo, g1, flow_by_class);
  const std::vector<StepDemand> d2 = step2_demands(g2, step1_graph_trees, g1, commodities, topo);
  const Lp3Model lp3 = build_lp3(g2, d2);

  t0 = Clock::now();
  const BasicSolution sol2 = simplex_solve(lp3.lp, options);
  out.stats.step2_solve_ms = ms_since(t0);
  out.stats.step2_iterations = sol2.iterations;
  out.stats.step2_objective = sol2.objective;
  if (sol2.status == SolveStatus::Infeasible) {
    out.status = PipelineStatus::Step2Infeasible;
    out.failing_stage = "step2";
    return out;
  }
  if (sol2.status != SolveStatus::Optimal || !check_basic_solution(lp3.lp, sol2, 1e-7, &why)) {
    out.status = PipelineStatus::NumericalFailure;
    out.failing_stage = "step2";
    return out;
  }

  std::vector<std::vector<double>> flow_by_dest = lp3_flow_by_dest(lp3, sol2.values);
  std::vector<MptpTree> step2_graph_trees;
  std::vector<int> step2_dest;  // destination ordinal per step-2 tree
  for (int ti = 0; ti < static_cast<int>(lp3.dests.size()); ++ti) {
    const int dest = lp3.dests[ti];
    std::map<int, double> demands;
    for (const StepDemand& d : d2)
      if (d.sink == dest) demands[d.node] += d.amount;
    auto cleaned = remove_cycles(g2, std::move(flow_by_dest[ti]));
    for (MptpTree& t : flow_to_trees(g2, dest, std::move(cleaned), demands)) {
      step2_dest.push_back(dest);
      step2_graph_trees.push_back(std::move(t));
    }
  }
  const int n1 = static_cast<int>(step1_graph_trees.size());
  for (int i = 0; i < static_cast<int>(step2_graph_trees.size()); ++i)
    step2_graph_trees[i].tag = n1 + i + 1;

  // Slice every commodity over its (step-1 tree, step-2 tree) pairs: the
  // destination-proportional split of each step-1 use, spread over the step-2
  // trees in proportion to how the peel divided that (entry, dest) demand.
  std::map<std::pair<int, int>, double> carried_total;           // (dest, entry) -> amount
  std::map<std::pair<int, int>, std::vector<int>> carried_by;    // -> step-2 tree indices
  for (int s = 0; s < static_cast<int>(step2_graph_trees.size()); ++s) {
    for (const auto& [src, amount] : step2_graph_trees[s].source_amounts) {
      carried_total[{step2_dest[s], src}] += amount;
      carried_by[{step2_dest[s], src}].push_back(s);
    }
  }

  const auto groups = group_step1_usage(g1, step1_graph_trees, commodities, topo);
  for (const GroupRouting& group : groups) {
    for (int ci : group.commodity_ids) {
      const int dest = topo.switch_ord[commodities[ci].dest];
      for (const Step1TreeUse& use : group.uses) {
        const double slice = use.amount * commodities[ci].demand / group.total_demand;
        if (slice <= 0.0) continue;
        const auto key = std::make_pair(dest, use.entry_node);
        const auto total_it = carried_total.find(key);
        if (total_it == carried_total.end() || total_it->second <= 0.0)
          continue;  // sub-1e-9 cell dropped by the peel; mass loss is below any check
        for (int s : carried_by[key]) {
          const double part =
              slice * step2_graph_trees[s].source_amounts.at(use.entry_node) / total_it->second;
          if (part > 0.0)
            out.commodity_shares[ci].push_back(
                {step1_graph_trees[use.tree_index].tag, step2_graph_trees[s].tag, part});
        }
      }
    }
  }

  // Lift step 2 onto the topology.
  for (const MptpTree& t : step2_graph_trees) {
    RoutedTree lifted = lift_step2_tree(t, g2, topo);
    lifted.tag = t.tag;
    out.step2_trees.push_back(std::move(lifted));
  }

  out.status = PipelineStatus::Ok;
  return out;
}

// --- JSON ---

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json tree_to_json(const RoutedTree& tree, const Topology& topo) {
  ordered_json j;
  j["root"] = tree.is_step1() ? "class:" + std::to_string(tree.root_class)
                              : topo.nodes[tree.root_switch].id;
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& [node, edge] : tree.parent)
    edges.push_back({topo.nodes[node].id, topo.nodes[topo.edges[edge].to].id});
  std::sort(edges.begin(), edges.end());
  ordered_json edge_list = ordered_json::array();
  for (const auto& [from, to] : edges) edge_list.push_back({{"from", from}, {"to", to}});
  j["edges"] = std::move(edge_list);
  std::map<std::string, double> sources;
  for (const auto& [node, amount] : tree.source_amounts) sources[topo.nodes[node].id] = amount;
  ordered_json src = ordered_json::object();
  for (const auto& [id, amount] : sources) src[id] = amount;
  j["sources"] = std::move(src);
  j["tag"] = tree.tag;
  return j;
}

RoutedTree tree_from_json(const ordered_json& j, const Topology& topo) {
  RoutedTree tree;
  const std::string root = j.at("root").get<std::string>();
  if (root.rfind("class:", 0) == 0) {
    tree.root_class = std::stoi(root.substr(6));
  } else {
    tree.root_switch = topo.node_index(root);
    if (tree.root_switch < 0)
      throw std::invalid_argument("solution: unknown tree root '" + root + "'");
  }
  for (const auto& e : j.at("edges")) {
    const int from = topo.node_index(e.at("from").get<std::string>());
    const int to = topo.node_index(e.at("to").get<std::string>());
    const int edge = from < 0 || to < 0 ? -1 : topo.find_edge(from, to);
    if (edge < 0)
      throw std::invalid_argument("solution: tree edge not in the topology: " +
                                  e.at("from").get<std::string>() + " -> " +
                                  e.at("to").get<std::string>());
    tree.parent[from] = edge;
  }
  for (const auto& [id, amount] : j.at("sources").items()) {
    const int node = topo.node_index(id);
    if (node < 0) throw std::invalid_argument("solution: unknown source '" + id + "'");
    tree.source_amounts[node] = amount.get<double>();
  }
  tree.tag = j.at("tag").get<int>();
  return tree;
}

}  // namespace

std::string solution_to_json(const RoutingSolution& solution, const Topology& topo) {
  ordered_json j;
  j["form"] = "trees";
  j["algorithm"] = "mptpt";
  j["status"] = to_string(solution.status);
  j["classes"] = solution.num_classes;
  ordered_json t1 = ordered_json::array();
  for (const RoutedTree& t : solution.step1_trees) t1.push_back(tree_to_json(t, topo));
  j["step1_trees"] = std::move(t1);
  ordered_json t2 = ordered_json::array();
  for (const RoutedTree& t : solution.step2_trees) t2.push_back(tree_to_json(t, topo));
  j["step2_trees"] = std::move(t2);
  ordered_json shares = ordered_json::array();
  for (std::size_t i = 0; i < solution.commodity_shares.size(); ++i) {
    ordered_json entry;
    entry["commodity"] = i;
    ordered_json parts = ordered_json::array();
    for (const SharePair& p : solution.commodity_shares[i])
      parts.push_back({{"step1_tag", p.step1_tag}, {"step2_tag", p.step2_tag},
                       {"amount", p.amount}});
    entry["parts"] = std::move(parts);
    shares.push_back(std::move(entry));
  }
  j["shares"] = std::move(shares);
  ordered_json stats;
  stats["step1_objective"] = solution.stats.step1_objective;
  stats["step2_objective"] = solution.stats.step2_objective;
  stats["step1_trees"] = solution.step1_trees.size();
  stats["step2_trees"] = solution.step2_trees.size();
  stats["total_trees"] = solution.total_trees();
  stats["bound"] = solution.stats.bound;
  stats["step1_iterations"] = solution.stats.step1_iterations;
  stats["step2_iterations"] = solution.stats.step2_iterations;
  stats["step1_solve_ms"] = solution.stats.step1_solve_ms;
  stats["step2_solve_ms"] = solution.stats.step2_solve_ms;
  j["stats"] = std::move(stats);
  return j.dump(2) + "\n";
}

RoutingSolution solution_from_json(const std::string& text, const Topology& topo) {
  const ordered_json j = ordered_json::parse(text);
  if (j.at("form").get<std::string>() != "trees")
    throw std::invalid_argument("solution: expected a tree-form solution");
  RoutingSolution out;
  const std::string status = j.at("status").get<std::string>();
  if (status == "ok")
    out.status = PipelineStatus::Ok;
  else if (status == "step1_infeasible")
    out.status = PipelineStatus::Step1Infeasible;
  else if (status == "step2_infeasible")
    out.status = PipelineStatus::Step2Infeasible;
  else
    out.status = PipelineStatus::NumericalFailure;
  out.num_classes = j.at("classes").get<int>();
  for (const auto& t : j.at("step1_trees")) out.step1_trees.push_back(tree_from_json(t, topo));
  for (const auto& t : j.at("step2_trees")) out.step2_trees.push_back(tree_from_json(t, topo));
  std::size_t max_commodity = 0;
  for (const auto& entry : j.at("shares"))
    max_commodity = std::max(max_commodity, entry.at("commodity").get<std::size_t>() + 1);
  out.commodity_shares.resize(max_commodity);
  for (const auto& entry : j.at("shares")) {
    auto& parts = out.commodity_shares[entry.at("commodity").get<std::size_t>()];
    for (const auto& p : entry.at("parts"))
      parts.push_back({p.at("step1_tag").get<int>(), p.at("step2_tag").get<int>(),
                       p.at("amount").get<double>()});
  }
  if (j.contains("stats")) {
    const auto& stats = j.at("stats");
    out.stats.step1_objective = stats.value("step1_objective", 0.0);
    out.stats.step2_objective = stats.value("step2_objective", 0.0);
    out.stats.bound = stats.value("bound", 0);
    out.stats.step1_iterations = stats.value("step1_iterations", 0L);
    out.stats.step2_iterations = stats.value("step2_iterations", 0L);
    out.stats.step1_solve_ms = stats.value("step1_solve_ms", 0.0);
    out.stats.step2_solve_ms = stats.value("step2_solve_ms", 0.0);
  }
  return out;
}

}  // namespace mptpt
