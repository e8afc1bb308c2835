#include "mptpt/rules.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "mptpt/trees.hpp"

namespace mptpt {

namespace {

constexpr double kEps = 1e-9;

/// Follow a tree's parent chain from `node`; returns the terminal node.
int chain_end(const RoutedTree& tree, const Topology& topo, int node) {
  int u = node;
  for (int hops = 0; hops <= static_cast<int>(topo.nodes.size()); ++hops) {
    auto it = tree.parent.find(u);
    if (it == tree.parent.end()) return u;
    u = topo.edges[it->second].to;
  }
  throw std::invalid_argument("rule compile: tree parent pointers form a loop (tag " +
                              std::to_string(tree.tag) + ")");
}

void compile_tree(const RoutedTree& tree, const Topology& topo, RuleTable& table,
                  std::set<std::pair<int, int>>& seen) {
  for (const auto& [node, edge] : tree.parent) {
    if (!topo.is_switch(node))
      throw std::invalid_argument("rule compile: tree entry on a non-switch node");
    if (!seen.insert({node, tree.tag}).second)
      throw std::invalid_argument("rule compile: duplicate rule for tag " +
                                  std::to_string(tree.tag) + " at " + topo.nodes[node].id);
    const int target = topo.edges[edge].to;
    Rule rule;
    rule.tag = tree.tag;
    rule.out_edge = edge;
    if (topo.is_pm(target)) {
      if (!tree.is_step1())
        throw std::invalid_argument("rule compile: delivery tree routes into a PM");
      rule.action = RuleAction::SendToPm;
      rule.pm = target;
      rule.pm_class = tree.root_class;
    } else {
      rule.action = RuleAction::Forward;
    }
    table.rules[node].push_back(rule);
  }
  // Dangling-tag check: every source must run out into the tree's terminal.
  for (const auto& [source, amount] : tree.source_amounts) {
    (void)amount;
    const int end = chain_end(tree, topo, source);
    const bool ok = tree.is_step1() ? topo.is_pm(end) : end == tree.root_switch;
    if (!ok)
      throw std::invalid_argument("rule compile: dangling tag " + std::to_string(tree.tag) +
                                  ": source " + topo.nodes[source].id +
                                  " does not reach the tree terminal");
  }
}

}  // namespace

RuleTable compile_rules(const RoutingSolution& solution, const Topology& topo,
                        const std::vector<Commodity>& commodities) {
  RuleTable table;
  table.rules.assign(topo.nodes.size(), {});
  table.classify_counts.assign(topo.nodes.size(), 0);

  std::set<std::pair<int, int>> seen;  // (switch, tag)
  for (const RoutedTree& tree : solution.step1_trees) compile_tree(tree, topo, table, seen);
  for (const RoutedTree& tree : solution.step2_trees) compile_tree(tree, topo, table, seen);

  const std::size_t n =
      std::min(commodities.size(), solution.commodity_shares.size());
  for (std::size_t ci = 0; ci < n; ++ci)
    table.classify_counts[commodities[ci].source] +=
        static_cast<int>(solution.commodity_shares[ci].size());

  for (auto& rules : table.rules)
    std::sort(rules.begin(), rules.end(),
              [](const Rule& a, const Rule& b) { return a.tag < b.tag; });
  return table;
}

int max_rule_count(const RuleTable& table) {
  int best = 0;
  for (int v = 0; v < table.node_count(); ++v) best = std::max(best, table.rule_count(v));
  return best;
}

double avg_rule_count(const RuleTable& table, const Topology& topo, bool used_only) {
  long total = 0;
  int used = 0;
  for (int v : topo.switch_list) {
    total += table.rule_count(v);
    if (table.rule_count(v) > 0) ++used;
  }
  const int denom = used_only ? used : topo.switch_count();
  return denom == 0 ? 0.0 : static_cast<double>(total) / denom;
}

std::string rule_table_csv(const RuleTable& table, const Topology& topo) {
  std::vector<int> switches = topo.switch_list;
  std::sort(switches.begin(), switches.end(),
            [&](int a, int b) { return topo.nodes[a].id < topo.nodes[b].id; });
  std::ostringstream out;
  out << "switch,tag,action,arg\n";
  for (int v : switches) {
    for (const Rule& rule : table.rules[v]) {
      out << topo.nodes[v].id << ',' << rule.tag << ',';
      switch (rule.action) {
        case RuleAction::Forward:
          out << "forward," << topo.nodes[topo.edges[rule.out_edge].to].id;
          break;
        case RuleAction::SendToPm:
          out << "send_to_pm," << topo.nodes[rule.pm].id << ':' << rule.pm_class;
          break;
        case RuleAction::PopTag1AndForward:
          out << "pop_tag1_forward," << topo.nodes[topo.edges[rule.out_edge].to].id;
          break;
      }
      out << '\n';
    }
  }
  return out.str();
}

ForwardingReport simulate_forwarding(const RuleTable& table, const RoutingSolution& solution,
                                     const Topology& topo,
                                     const std::vector<Commodity>& commodities,
                                     const std::vector<ClassSpec>& classes) {
  ForwardingReport report;
  std::unordered_map<long long, const Rule*> lookup;
  for (int v = 0; v < table.node_count(); ++v)
    for (const Rule& rule : table.rules[v])
      lookup[(static_cast<long long>(v) << 32) | static_cast<unsigned>(rule.tag)] = &rule;
  const auto find_rule = [&](int node, int tag) -> const Rule* {
    auto it = lookup.find((static_cast<long long>(node) << 32) | static_cast<unsigned>(tag));
    return it == lookup.end() ? nullptr : it->second;
  };

  std::vector<double> link_load(topo.edge_count(), 0.0);
  std::vector<double> pm_load(topo.nodes.size(), 0.0);
  const int hop_guard = 4 * static_cast<int>(topo.nodes.size()) + 8;

  for (std::size_t i = 0; i < solution.commodity_shares.size(); ++i) {
    const Commodity& c = commodities.at(i);
    const double unit_cost = classes.at(c.class_id - 1).unit_cost;
    for (const SharePair& share : solution.commodity_shares[i]) {
      ++report.traces;
      const double a = share.amount;
      int cur = c.source;
      int stage = 1;
      int pms = 0;
      bool stopped = false;
      for (int hops = 0; !stopped; ++hops) {
        if (hops > hop_guard) {
          report.violations.push_back("commodity " + std::to_string(i) +
                                      ": forwarding loop (hop limit at " +
                                      topo.nodes[cur].id + ")");
          break;
        }
        const int tag = stage == 1 ? share.step1_tag : share.step2_tag;
        const Rule* rule = find_rule(cur, tag);
        if (rule == nullptr) {
          if (stage == 2 && cur == c.dest) {
            ++report.delivered;
            if (pms != 1)
              report.violations.push_back("commodity " + std::to_string(i) + ": visited " +
                                          std::to_string(pms) + " PMs");
          } else {
            report.violations.push_back("commodity " + std::to_string(i) + ": no rule for tag " +
                                        std::to_string(tag) + " at " + topo.nodes[cur].id);
          }
          break;
        }
        switch (rule->action) {
          case RuleAction::SendToPm: {
            if (stage == 2) {
              report.violations.push_back("commodity " + std::to_string(i) +
                                          ": sent to a PM after processing");
              stopped = true;
              break;
            }
            if (rule->pm_class != c.class_id)
              report.violations.push_back(
                  "commodity " + std::to_string(i) + ": processed by the class-" +
                  std::to_string(rule->pm_class) + " VM, carries class " +
                  std::to_string(c.class_id));
            ++pms;
            pm_load[rule->pm] += unit_cost * a;
            link_load[rule->out_edge] += a;
            const int back = topo.pm_out_edge[rule->pm];
            if (back >= 0) link_load[back] += a;
            stage = 2;  // the PM strips the first tag; cur stays at its switch
            break;
          }
          case RuleAction::Forward:
          case RuleAction::PopTag1AndForward: {
            link_load[rule->out_edge] += a;
            cur = topo.edges[rule->out_edge].to;
            if (!topo.is_switch(cur)) {
              report.violations.push_back("commodity " + std::to_string(i) +
                                          ": forwarded into a non-switch node");
              stopped = true;
              break;
            }
            if (rule->action == RuleAction::PopTag1AndForward && stage == 1) stage = 2;
            break;
          }
        }
      }
    }
  }

  for (int e = 0; e < topo.edge_count(); ++e) {
    const double excess = link_load[e] - topo.edges[e].capacity;
    if (excess > 1e-6)
      report.violations.push_back("link " + topo.nodes[topo.edges[e].from].id + "->" +
                                  topo.nodes[topo.edges[e].to].id + " overloaded by " +
                                  std::to_string(excess));
  }
  for (int pm : topo.pm_list) {
    const double excess = pm_load[pm] - topo.nodes[pm].pm_capacity;
    if (excess > 1e-6)
      report.violations.push_back("PM " + topo.nodes[pm].id + " overloaded by " +
                                  std::to_string(excess));
  }
  return report;
}

namespace {

/// The whole topology as a step graph so the cycle canceller can run on
/// per-commodity one-shot flows (PM nodes included).
StepGraph topo_view(const Topology& topo) {
  StepGraph g;
  g.num_nodes = static_cast<int>(topo.nodes.size());
  g.num_switches = g.num_nodes;
  for (int e = 0; e < topo.edge_count(); ++e)
    g.edges.push_back({topo.edges[e].from, topo.edges[e].to, topo.edges[e].capacity, e, -1, 0});
  g.build_adjacency();
  return g;
}

struct Bfs {
  std::vector<int> dist;
  std::vector<int> via;  // edge that discovered the node
};

Bfs bfs_over(const Topology& topo, const std::vector<double>& flow, int start, bool backward) {
  Bfs out;
  out.dist.assign(topo.nodes.size(), -1);
  out.via.assign(topo.nodes.size(), -1);
  out.dist[start] = 0;
  std::queue<int> frontier;
  frontier.push(start);
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int e : backward ? topo.in_edges[u] : topo.out_edges[u]) {
      if (flow[e] <= kEps) continue;
      const int w = backward ? topo.edges[e].from : topo.edges[e].to;
      if (!topo.is_switch(w) || out.dist[w] >= 0) continue;
      out.dist[w] = out.dist[u] + 1;
      out.via[w] = e;
      frontier.push(w);
    }
  }
  return out;
}

}  // namespace

std::vector<CommodityPath> decompose_paths(const Lp1Model& model,
                                           const std::vector<double>& values,
                                           const Topology& topo,
                                           const std::vector<Commodity>& commodities,
                                           double tol) {
  if (static_cast<int>(values.size()) != model.lp.num_vars)
    throw std::invalid_argument("decompose_paths: value vector does not match the model");
  const StepGraph view = topo_view(topo);
  std::vector<CommodityPath> paths;

  for (int i = 0; i < static_cast<int>(commodities.size()); ++i) {
    const Commodity& c = commodities[i];
    std::vector<double> f0(model.num_edges), f1(model.num_edges);
    for (int e = 0; e < model.num_edges; ++e) {
      f0[e] = values[model.var(0, i, e)];
      f1[e] = values[model.var(1, i, e)];
    }
    f0 = remove_cycles(view, std::move(f0));
    f1 = remove_cycles(view, std::move(f1));

    double remaining = c.demand;
    const long guard = 2L * model.num_edges + 8;
    for (long round = 0; remaining > kEps; ++round) {
      if (round > guard)
        throw std::runtime_error("decompose_paths: peeling did not converge");
      const Bfs fwd = bfs_over(topo, f0, c.source, false);
      const Bfs bwd = bfs_over(topo, f1, c.dest, true);

      // Hop-shortest PM round trip still carrying flow (ties: lowest PM index).
      int best_pm = -1;
      int best_cost = 0;
      for (int pm : topo.pm_list) {
        const int v = topo.attached_switch[pm];
        if (fwd.dist[v] < 0 || bwd.dist[v] < 0) continue;
        if (f0[topo.pm_in_edge[pm]] <= kEps || f1[topo.pm_out_edge[pm]] <= kEps) continue;
        const int cost = fwd.dist[v] + bwd.dist[v] + 2;
        if (best_pm < 0 || cost < best_cost) {
          best_pm = pm;
          best_cost = cost;
        }
      }
      if (best_pm < 0) {
        if (remaining > tol)
          throw std::runtime_error("decompose_paths: commodity " + std::to_string(i) + " has " +
                                   std::to_string(remaining) + " undecomposable demand");
        break;
      }

      const int venter = topo.attached_switch[best_pm];
      std::vector<int> leg1;  // source .. venter
      for (int u = venter; u != c.source; u = topo.edges[fwd.via[u]].from) leg1.push_back(u);
      leg1.push_back(c.source);
      std::reverse(leg1.begin(), leg1.end());
      std::vector<int> leg2;  // venter .. dest
      for (int u = venter; u != c.dest; u = topo.edges[bwd.via[u]].to) leg2.push_back(u);
      leg2.push_back(c.dest);

      double amount = remaining;
      for (std::size_t k = 0; k + 1 < leg1.size(); ++k)
        amount = std::min(amount, f0[topo.find_edge(leg1[k], leg1[k + 1])]);
      amount = std::min(amount, f0[topo.pm_in_edge[best_pm]]);
      amount = std::min(amount, f1[topo.pm_out_edge[best_pm]]);
      for (std::size_t k = 0; k + 1 < leg2.size(); ++k)
        amount = std::min(amount, f1[topo.find_edge(leg2[k], leg2[k + 1])]);
      if (amount <= kEps)
        throw std::runtime_error("decompose_paths: degenerate augmenting walk");

      for (std::size_t k = 0; k + 1 < leg1.size(); ++k) {
        double& f = f0[topo.find_edge(leg1[k], leg1[k + 1])];
        f -= amount;
        if (f <= kEps) f = 0.0;
      }
      auto drain = [&](std::vector<double>& f, int e) {
        f[e] -= amount;
        if (f[e] <= kEps) f[e] = 0.0;
      };
      drain(f0, topo.pm_in_edge[best_pm]);
      drain(f1, topo.pm_out_edge[best_pm]);
      for (std::size_t k = 0; k + 1 < leg2.size(); ++k) {
        double& f = f1[topo.find_edge(leg2[k], leg2[k + 1])];
        f -= amount;
        if (f <= kEps) f = 0.0;
      }
      remaining -= amount;
      if (remaining <= kEps) remaining = 0.0;

      CommodityPath path;
      path.commodity = i;
      path.nodes = leg1;
      path.nodes.push_back(best_pm);
      path.nodes.insert(path.nodes.end(), leg2.begin(), leg2.end());
      path.amount = amount;
      paths.push_back(std::move(path));
    }
  }
  return paths;
}

std::vector<int> path_rule_counts(const std::vector<CommodityPath>& paths,
                                  const Topology& topo) {
  std::vector<int> counts(topo.nodes.size(), 0);
  std::set<int> on_path;
  for (const CommodityPath& path : paths) {
    on_path.clear();
    for (int node : path.nodes)
      if (topo.is_switch(node)) on_path.insert(node);
    if (!path.nodes.empty()) on_path.erase(path.nodes.back());
    for (int node : on_path) ++counts[node];
  }
  return counts;
}

}  // namespace mptpt
