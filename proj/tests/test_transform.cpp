#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "mptpt/topology.hpp"
#include "mptpt/transform.hpp"
#include "test_util.hpp"

using namespace mptpt;

namespace {

int g1_edge(const StepGraph& g, int from, int to) {
  for (int e = 0; e < g.edge_count(); ++e)
    if (g.edges[e].from == from && g.edges[e].to == to) return e;
  return -1;
}

}  // namespace

TEST_CASE("step-1 graph: one sink per class, couplings from PM hosts") {
  const Topology t = gen_fig1();
  const StepGraph g1 = build_g1(t, 7);
  CHECK(g1.num_switches == 6);
  CHECK(g1.num_nodes == 13);
  CHECK(g1.class_sinks.size() == 7);
  // |E1| = |E0| + |V_pm| * (C - 2)
  CHECK(g1.edge_count() == 18 + 3 * (7 - 2));

  int couplings = 0, structural = 0;
  for (const StepEdge& e : g1.edges) {
    if (e.coupling_switch >= 0) {
      ++couplings;
      CHECK(e.capacity == kUnlimited);
      CHECK(g1.is_sink(e.to));
      CHECK(e.coupling_class >= 1);
      CHECK(e.coupling_class <= 7);
      CHECK(t.attached_pm[e.coupling_switch] >= 0);
    } else {
      ++structural;
      REQUIRE(e.topo_edge >= 0);
      CHECK(t.edges[e.topo_edge].capacity == doctest::Approx(e.capacity));
      CHECK(t.is_switch(t.edges[e.topo_edge].from));
      CHECK(t.is_switch(t.edges[e.topo_edge].to));
    }
  }
  CHECK(couplings == 3 * 7);
  CHECK(structural == 12);

  CHECK(build_g1(t, 1).edge_count() == 18 + 3 * (1 - 2));
  CHECK_THROWS_AS(build_g1(t, 0), std::invalid_argument);
}

TEST_CASE("edge-count identities on all fixtures") {
  struct Row {
    Topology topo;
    int e0;
    int pms;
  };
  const std::vector<Row> rows = {
      {gen_fig1(), 18, 3},
      {gen_fat_tree(), 60, 6},
      {load_topology(std::string(MPTPT_DATA_DIR) + "/geant.json"), 146, 9},
  };
  for (const Row& r : rows) {
    REQUIRE(r.topo.edge_count() == r.e0);
    for (int c : {1, 3, 5, 7})
      CHECK(build_g1(r.topo, c).edge_count() == r.e0 + r.pms * (c - 2));
    const StepGraph g1 = build_g1(r.topo, 3);
    const std::vector<std::vector<double>> zero(3, std::vector<double>(g1.edge_count(), 0.0));
    CHECK(build_g2(r.topo, g1, zero).edge_count() == r.e0 - 2 * r.pms);
  }
}

TEST_CASE("step-1 demands aggregate commodities by (source, class)") {
  const Topology t = gen_fig1();
  const StepGraph g1 = build_g1(t, 3);
  const int a = t.node_index("sw3"), b = t.node_index("sw4"), c = t.node_index("sw5");
  const std::vector<Commodity> cs = {
      {a, b, 2.0, 1}, {a, c, 3.0, 1},  // same group
      {a, b, 1.0, 2},                  // same source, other class
      {c, b, 4.0, 1},
  };
  const std::vector<StepDemand> d = step1_demands(g1, cs, t);
  REQUIRE(d.size() == 3);
  // Ordered by (source ordinal, class). sw3 < sw5 in switch order.
  CHECK(d[0].node == t.switch_ord[a]);
  CHECK(d[0].sink == g1.class_sinks[0]);
  CHECK(d[0].amount == doctest::Approx(5.0));
  CHECK(d[1].node == t.switch_ord[a]);
  CHECK(d[1].sink == g1.class_sinks[1]);
  CHECK(d[1].amount == doctest::Approx(1.0));
  CHECK(d[2].node == t.switch_ord[c]);
  CHECK(d[2].amount == doctest::Approx(4.0));

  const std::vector<Commodity> bad = {{a, b, 1.0, 9}};  // only 3 classes exist
  CHECK_THROWS_AS(step1_demands(g1, bad, t), std::invalid_argument);
}

TEST_CASE("step-2 graph carries the residual capacity step 1 left") {
  const Topology t = testutil::fig3_topology();
  const StepGraph g1 = build_g1(t, 1);
  std::vector<std::vector<double>> flow(1, std::vector<double>(g1.edge_count(), 0.0));
  const int sv1 = g1_edge(g1, t.switch_ord[t.node_index("s")], t.switch_ord[t.node_index("v1")]);
  REQUIRE(sv1 >= 0);
  flow[0][sv1] = 25.0;

  const StepGraph g2 = build_g2(t, g1, flow);
  CHECK(g2.edge_count() == 16 - 2 * 2);
  CHECK(g2.num_nodes == g2.num_switches);

  bool found = false;
  for (const StepEdge& e : g2.edges) {
    REQUIRE(e.topo_edge >= 0);
    if (e.topo_edge == g1.edges[sv1].topo_edge) {
      found = true;
      CHECK(e.capacity == doctest::Approx(15.0));  // 40 - 25
    }
  }
  CHECK(found);

  flow[0][sv1] = 40.0 + 1e-9;  // a solver-sized overshoot is clamped
  CHECK_NOTHROW(build_g2(t, g1, flow));
  flow[0][sv1] = 41.0;  // a real overshoot is corrupt input
  CHECK_THROWS_AS(build_g2(t, g1, flow), std::runtime_error);
}

TEST_CASE("destination split is exactly proportional") {
  const auto split = distribute_by_destination({40.0, 60.0}, {30.0, 70.0});
  REQUIRE(split.size() == 2);
  REQUIRE(split[0].size() == 2);
  CHECK(split[0][0] == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(split[0][1] == doctest::Approx(28.0).epsilon(1e-12));
  CHECK(split[1][0] == doctest::Approx(18.0).epsilon(1e-12));
  CHECK(split[1][1] == doctest::Approx(42.0).epsilon(1e-12));

  CHECK_THROWS_AS(distribute_by_destination({1.0}, {}), std::invalid_argument);
  CHECK_THROWS_AS(distribute_by_destination({1.0}, {0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(distribute_by_destination({1.0}, {-1.0, 2.0}), std::invalid_argument);
}

namespace {

/// The two forced step-1 trees of the fig3 fixture, built by hand: 40 units
/// enter at v1, 60 at v2, both from source s toward the class-1 sink.
std::vector<MptpTree> fig3_hand_trees(const Topology& t, const StepGraph& g1) {
  const int s = t.switch_ord[t.node_index("s")];
  const int v1 = t.switch_ord[t.node_index("v1")];
  const int v2 = t.switch_ord[t.node_index("v2")];
  const int sink = g1.class_sinks[0];
  MptpTree t1;
  t1.root = sink;
  t1.parent_edge[s] = g1_edge(g1, s, v1);
  t1.parent_edge[v1] = g1_edge(g1, v1, sink);
  t1.source_amounts[s] = 40.0;
  MptpTree t2;
  t2.root = sink;
  t2.parent_edge[s] = g1_edge(g1, s, v2);
  t2.parent_edge[v2] = g1_edge(g1, v2, sink);
  t2.source_amounts[s] = 60.0;
  return {t1, t2};
}

}  // namespace

TEST_CASE("group usage reports entry switches and carried amounts") {
  const Topology t = testutil::fig3_topology();
  const StepGraph g1 = build_g1(t, 1);
  const std::vector<Commodity> cs = testutil::fig3_commodities(t);
  const auto trees = fig3_hand_trees(t, g1);

  const std::vector<GroupRouting> groups = group_step1_usage(g1, trees, cs, t);
  REQUIRE(groups.size() == 1);
  const GroupRouting& g = groups[0];
  CHECK(g.source == t.node_index("s"));
  CHECK(g.class_id == 1);
  CHECK(g.total_demand == doctest::Approx(100.0));
  CHECK(g.commodity_ids == std::vector<int>{0, 1});
  REQUIRE(g.uses.size() == 2);
  CHECK(g.uses[0].entry_node == t.switch_ord[t.node_index("v1")]);
  CHECK(g.uses[0].amount == doctest::Approx(40.0));
  CHECK(g.uses[1].entry_node == t.switch_ord[t.node_index("v2")]);
  CHECK(g.uses[1].amount == doctest::Approx(60.0));
}

TEST_CASE("step-2 demands: the worked 40/60 x 30/70 split") {
  const Topology t = testutil::fig3_topology();
  const StepGraph g1 = build_g1(t, 1);
  const std::vector<Commodity> cs = testutil::fig3_commodities(t);
  const auto trees = fig3_hand_trees(t, g1);
  const std::vector<std::vector<double>> zero(1, std::vector<double>(g1.edge_count(), 0.0));
  const StepGraph g2 = build_g2(t, g1, zero);

  const std::vector<StepDemand> d = step2_demands(g2, trees, g1, cs, t);
  REQUIRE(d.size() == 4);
  const int v1 = t.switch_ord[t.node_index("v1")], v2 = t.switch_ord[t.node_index("v2")];
  const int t1 = t.switch_ord[t.node_index("t1")], t2 = t.switch_ord[t.node_index("t2")];
  // Ordered by (destination, entry node).
  CHECK(d[0].sink == t1);
  CHECK(d[0].node == v1);
  CHECK(d[0].amount == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(d[1].sink == t1);
  CHECK(d[1].node == v2);
  CHECK(d[1].amount == doctest::Approx(18.0).epsilon(1e-12));
  CHECK(d[2].sink == t2);
  CHECK(d[2].node == v1);
  CHECK(d[2].amount == doctest::Approx(28.0).epsilon(1e-12));
  CHECK(d[3].sink == t2);
  CHECK(d[3].node == v2);
  CHECK(d[3].amount == doctest::Approx(42.0).epsilon(1e-12));
}

TEST_CASE("step-2 demand derivation rejects trees that lose mass") {
  const Topology t = testutil::fig3_topology();
  const StepGraph g1 = build_g1(t, 1);
  const std::vector<Commodity> cs = testutil::fig3_commodities(t);
  auto trees = fig3_hand_trees(t, g1);
  trees[1].source_amounts[t.switch_ord[t.node_index("s")]] = 50.0;  // 40+50 != 100
  const std::vector<std::vector<double>> zero(1, std::vector<double>(g1.edge_count(), 0.0));
  const StepGraph g2 = build_g2(t, g1, zero);
  CHECK_THROWS_AS(step2_demands(g2, trees, g1, cs, t), std::logic_error);
}
