#include "mptpt/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <queue>
#include <stdexcept>

#include "json.hpp"
#include "mptpt/lp_builders.hpp"

namespace mptpt {

namespace {

constexpr double kEps = 1e-9;
using Clock = std::chrono::steady_clock;

}  // namespace

BaselineResult solve_lp1_baseline(const Topology& topo,
                                  const std::vector<Commodity>& commodities,
                                  const std::vector<ClassSpec>& classes,
                                  const SimplexOptions& options) {
  BaselineResult out;
  for (const Commodity& c : commodities) out.total_demand += c.demand;

  const Lp1Model model = build_lp1_relaxed(topo, commodities, classes);
  const auto t0 = Clock::now();
  const BasicSolution sol = simplex_solve(model.lp, options);
  out.solve_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  out.iterations = sol.iterations;
  out.status = sol.status;
  out.objective = sol.objective;
  if (sol.status != SolveStatus::Optimal) return out;
  if (!check_basic_solution(model.lp, sol)) {
    out.status = SolveStatus::NumericalFailure;
    return out;
  }
  if (options.feasibility_only) return out;  // probe: no decomposition wanted

  out.paths = decompose_paths(model, sol.values, topo, commodities);
  for (const CommodityPath& p : out.paths) out.routed += p.amount;
  out.rule_counts = path_rule_counts(out.paths, topo);
  return out;
}

namespace {

/// BFS over links whose residual capacity is still positive, neighbors in
/// lexicographic-id order so shortest paths tie-break deterministically.
struct ResidualBfs {
  std::vector<int> dist;
  std::vector<int> via;
};

ResidualBfs residual_bfs(const Topology& topo,
                         const std::vector<std::vector<int>>& adjacency,
                         const std::vector<double>& residual, int start) {
  ResidualBfs out;
  out.dist.assign(topo.nodes.size(), -1);
  out.via.assign(topo.nodes.size(), -1);
  out.dist[start] = 0;
  std::queue<int> frontier;
  frontier.push(start);
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int e : adjacency[u]) {
      if (residual[e] <= kEps) continue;
      const int w = topo.edges[e].from == u ? topo.edges[e].to : topo.edges[e].from;
      if (out.dist[w] >= 0) continue;
      out.dist[w] = out.dist[u] + 1;
      out.via[w] = e;
      frontier.push(w);
    }
  }
  return out;
}

}  // namespace

BaselineResult greedy_shortest_path(const Topology& topo,
                                    const std::vector<Commodity>& commodities,
                                    const std::vector<ClassSpec>& classes,
                                    const GreedyOptions& options) {
  BaselineResult out;
  out.status = SolveStatus::Optimal;
  for (const Commodity& c : commodities) out.total_demand += c.demand;

  // Switch-switch adjacency with targets in lexicographic-id order: forward
  // lists for the source leg, reversed lists for the destination leg.
  std::vector<std::vector<int>> fwd(topo.nodes.size()), bwd(topo.nodes.size());
  for (int e : topo.switch_switch_edges) {
    fwd[topo.edges[e].from].push_back(e);
    bwd[topo.edges[e].to].push_back(e);
  }
  for (int v : topo.switch_list) {
    std::sort(fwd[v].begin(), fwd[v].end(), [&](int a, int b) {
      return topo.nodes[topo.edges[a].to].id < topo.nodes[topo.edges[b].to].id;
    });
    std::sort(bwd[v].begin(), bwd[v].end(), [&](int a, int b) {
      return topo.nodes[topo.edges[a].from].id < topo.nodes[topo.edges[b].from].id;
    });
  }

  std::vector<double> link_residual(topo.edge_count());
  for (int e = 0; e < topo.edge_count(); ++e) link_residual[e] = topo.edges[e].capacity;
  std::vector<double> pm_residual(topo.nodes.size(), 0.0);
  for (int pm : topo.pm_list) pm_residual[pm] = topo.nodes[pm].pm_capacity;

  std::vector<int> order(commodities.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double wa = classes.at(commodities[a].class_id - 1).unit_cost * commodities[a].demand;
    const double wb = classes.at(commodities[b].class_id - 1).unit_cost * commodities[b].demand;
    return wa > wb;
  });

  const long round_guard = topo.edge_count() + topo.pm_count() + 4;
  bool stop_all = false;
  for (int i : order) {
    if (stop_all) break;
    const Commodity& c = commodities[i];
    const double unit_cost = classes.at(c.class_id - 1).unit_cost;
    double remaining = c.demand;

    for (long round = 0; remaining > kEps; ++round) {
      if (round > round_guard)
        throw std::logic_error("greedy: augmentation did not converge");
      const ResidualBfs f = residual_bfs(topo, fwd, link_residual, c.source);
      const ResidualBfs b = residual_bfs(topo, bwd, link_residual, c.dest);

      int best_pm = -1, best_cost = 0;
      for (int pm : topo.pm_list) {
        const int v = topo.attached_switch[pm];
        if (f.dist[v] < 0 || b.dist[v] < 0) continue;
        if (pm_residual[pm] <= kEps) continue;
        if (link_residual[topo.pm_in_edge[pm]] <= kEps ||
            link_residual[topo.pm_out_edge[pm]] <= kEps)
          continue;
        const int cost = f.dist[v] + b.dist[v] + 2;
        const int bv = best_pm < 0 ? -1 : topo.attached_switch[best_pm];
        if (best_pm < 0 || cost < best_cost ||
            (cost == best_cost && topo.nodes[v].id < topo.nodes[bv].id)) {
          best_pm = pm;
          best_cost = cost;
        }
      }
      if (best_pm < 0) {
        out.stopped_early = true;
        if (!options.skip_stuck_commodities) stop_all = true;
        break;
      }

      const int venter = topo.attached_switch[best_pm];
      std::vector<int> leg1{venter};
      while (leg1.back() != c.source) leg1.push_back(topo.edges[f.via[leg1.back()]].from);
      std::reverse(leg1.begin(), leg1.end());
      std::vector<int> leg2{venter};
      while (leg2.back() != c.dest) leg2.push_back(topo.edges[b.via[leg2.back()]].to);

      // A link used twice by the round trip can only give half its residual.
      std::map<int, int> uses;
      for (std::size_t k = 0; k + 1 < leg1.size(); ++k)
        ++uses[topo.find_edge(leg1[k], leg1[k + 1])];
      ++uses[topo.pm_in_edge[best_pm]];
      ++uses[topo.pm_out_edge[best_pm]];
      for (std::size_t k = 0; k + 1 < leg2.size(); ++k)
        ++uses[topo.find_edge(leg2[k], leg2[k + 1])];

      double amount = std::min(remaining, pm_residual[best_pm] / unit_cost);
      for (const auto& [e, n] : uses) amount = std::min(amount, link_residual[e] / n);
      if (amount <= kEps) {
        out.stopped_early = true;
        if (!options.skip_stuck_commodities) stop_all = true;
        break;
      }

      for (const auto& [e, n] : uses) {
        link_residual[e] -= amount * n;
        if (link_residual[e] < -kEps)
          throw std::logic_error("greedy: residual link capacity went negative");
        if (link_residual[e] < 0.0) link_residual[e] = 0.0;
      }
      pm_residual[best_pm] -= amount * unit_cost;
      if (pm_residual[best_pm] < -kEps)
        throw std::logic_error("greedy: residual PM capacity went negative");
      if (pm_residual[best_pm] < 0.0) pm_residual[best_pm] = 0.0;

      CommodityPath path;
      path.commodity = i;
      path.nodes = leg1;
      path.nodes.push_back(best_pm);
      path.nodes.insert(path.nodes.end(), leg2.begin(), leg2.end());
      path.amount = amount;
      out.paths.push_back(std::move(path));

      remaining -= amount;
      out.routed += amount;
    }
  }

  std::stable_sort(out.paths.begin(), out.paths.end(),
                   [](const CommodityPath& a, const CommodityPath& b) {
                     return a.commodity < b.commodity;
                   });
  out.rule_counts = path_rule_counts(out.paths, topo);
  return out;
}

std::string paths_to_json(const BaselineResult& result, const std::string& algorithm,
                          const Topology& topo) {
  nlohmann::ordered_json j;
  j["form"] = "paths";
  j["algorithm"] = algorithm;
  switch (result.status) {
    case SolveStatus::Optimal: j["status"] = "ok"; break;
    case SolveStatus::Infeasible: j["status"] = "infeasible"; break;
    case SolveStatus::Unbounded: j["status"] = "unbounded"; break;
    case SolveStatus::NumericalFailure: j["status"] = "numerical_failure"; break;
  }
  j["routed"] = result.routed;
  j["total_demand"] = result.total_demand;
  j["stopped_early"] = result.stopped_early;
  nlohmann::ordered_json paths = nlohmann::ordered_json::array();
  for (const CommodityPath& p : result.paths) {
    nlohmann::ordered_json entry;
    entry["commodity"] = p.commodity;
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    for (int n : p.nodes) nodes.push_back(topo.nodes.at(n).id);
    entry["nodes"] = std::move(nodes);
    entry["amount"] = p.amount;
    paths.push_back(std::move(entry));
  }
  j["paths"] = std::move(paths);
  nlohmann::ordered_json stats;
  stats["objective"] = result.objective;
  stats["iterations"] = result.iterations;
  stats["solve_ms"] = result.solve_ms;
  j["stats"] = std::move(stats);
  return j.dump(2) + "\n";
}

BaselineResult paths_from_json(const std::string& text, const Topology& topo,
                               std::string* algorithm) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw std::runtime_error(std::string("solution parse error: ") + err.what());
  }
  if (!j.is_object() || !j.contains("form") || j.at("form").get<std::string>() != "paths")
    throw std::runtime_error("solution: expected a path-form solution");
  if (algorithm != nullptr) *algorithm = j.at("algorithm").get<std::string>();
  BaselineResult out;
  const std::string status = j.at("status").get<std::string>();
  out.status = status == "ok"           ? SolveStatus::Optimal
               : status == "infeasible" ? SolveStatus::Infeasible
               : status == "unbounded"  ? SolveStatus::Unbounded
                                        : SolveStatus::NumericalFailure;
  out.routed = j.value("routed", 0.0);
  out.total_demand = j.value("total_demand", 0.0);
  out.stopped_early = j.value("stopped_early", false);
  for (const auto& entry : j.at("paths")) {
    CommodityPath p;
    p.commodity = entry.at("commodity").get<int>();
    for (const auto& id : entry.at("nodes")) {
      const int node = topo.node_index(id.get<std::string>());
      if (node < 0)
        throw std::invalid_argument("solution: unknown node '" + id.get<std::string>() + "'");
      p.nodes.push_back(node);
    }
    p.amount = entry.at("amount").get<double>();
    out.paths.push_back(std::move(p));
  }
  if (j.contains("stats")) {
    out.objective = j.at("stats").value("objective", 0.0);
    out.iterations = j.at("stats").value("iterations", 0L);
  }
  out.rule_counts = path_rule_counts(out.paths, topo);
  return out;
}

}  // namespace mptpt
