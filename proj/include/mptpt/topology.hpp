#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

namespace mptpt {

inline constexpr double kUnlimited = std::numeric_limits<double>::infinity();

enum class NodeKind { Switch, Pm };

struct Node {
  std::string id;
  NodeKind kind = NodeKind::Switch;
  double pm_capacity = 0.0;        // PM nodes: processing budget b(v)
  double memory = kUnlimited;      // switches: rule-table budget m(v)
};

/// Directed edge. Bidirectional input links expand to two of these.
struct Edge {
  int from = -1;
  int to = -1;
  double capacity = 0.0;
};

/// Traffic class: every PM hosts a VM per class, unit processing cost p(c).
struct ClassSpec {
  int id = 0;
  double unit_cost = 1.0;
  std::vector<std::string> functions;
};

struct Commodity {
  int source = -1;  // node index, must be a switch
  int dest = -1;    // node index, must be a switch, != source
  double demand = 0.0;
  int class_id = 1;
};

/// Network of switches and consolidated-middlebox PMs.
/// Index members are derived from nodes/edges; factories and loaders call
/// rebuild_index(), call it again after any manual mutation.
struct Topology {
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::vector<ClassSpec> classes;

  // Derived lookups.
  std::vector<int> switch_list;              // node indices, ascending
  std::vector<int> pm_list;
  std::vector<int> switch_ord;               // node -> position in switch_list, -1
  std::vector<int> attached_pm;              // switch node -> pm node, -1 if none
  std::vector<int> attached_switch;          // pm node -> switch node, -1
  std::vector<int> pm_in_edge;               // pm node -> edge (switch->pm), -1
  std::vector<int> pm_out_edge;              // pm node -> edge (pm->switch), -1
  std::vector<std::vector<int>> out_edges;   // node -> edge indices
  std::vector<std::vector<int>> in_edges;
  std::vector<int> switch_switch_edges;      // edges with both endpoints switches

  void rebuild_index();

  int switch_count() const { return static_cast<int>(switch_list.size()); }
  int pm_count() const { return static_cast<int>(pm_list.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }
  bool is_switch(int v) const { return nodes[v].kind == NodeKind::Switch; }
  bool is_pm(int v) const { return nodes[v].kind == NodeKind::Pm; }
  int node_index(const std::string& id) const;  // -1 if unknown
  int find_edge(int from, int to) const;        // -1 if absent

 private:
  std::unordered_map<std::string, int> id_to_node_;
  std::unordered_map<std::uint64_t, int> edge_lookup_;
};

/// Structural invariant check; returns one message per violation, empty = valid.
std::vector<std::string> validate(const Topology& topo);

/// 6-switch ring (sw1..sw6), PMs on sw1/sw2/sw6, link capacity 100, PM capacity 500.
Topology gen_fig1();

/// 2 core + 4 aggregate + 16 edge switches; PMs on every core and aggregate
/// switch; core-agg 200, agg-edge 10, switch-PM 100; PM capacity 500.
Topology gen_fat_tree();

Topology load_topology(const std::string& path);
Topology parse_topology_json(const std::string& text);
void save_topology(const Topology& topo, const std::string& path);
std::string topology_to_json(const Topology& topo);

/// Uniform random (source, dest, class) draws, source != dest, all demands equal.
/// Same seed reproduces the same list byte for byte.
std::vector<Commodity> gen_random_commodities(const Topology& topo, int count,
                                              int num_classes, double demand,
                                              std::uint64_t seed);

std::vector<Commodity> load_commodities(const Topology& topo, const std::string& path);
std::vector<Commodity> parse_commodities_csv(const Topology& topo, const std::string& text);
void save_commodities(const Topology& topo, const std::vector<Commodity>& commodities,
                      const std::string& path);
std::string commodities_to_csv(const Topology& topo, const std::vector<Commodity>& commodities);

/// Per-class unit costs for classes 1..num_classes: taken from topo.classes when
/// defined there, 1.0 otherwise.
std::vector<ClassSpec> classes_for(const Topology& topo, int num_classes);

}  // namespace mptpt
