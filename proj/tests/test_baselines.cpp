#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "mptpt/baselines.hpp"
#include "mptpt/lp_builders.hpp"
#include "mptpt/pipeline.hpp"
#include "mptpt/verify.hpp"
#include "test_util.hpp"

using namespace mptpt;

namespace {

std::map<int, double> routed_per_commodity(const BaselineResult& r) {
  std::map<int, double> sums;
  for (const auto& p : r.paths) sums[p.commodity] += p.amount;
  return sums;
}

}  // namespace

TEST_CASE("lp1 baseline routes the two-destination split instance optimally") {
  const Topology t = testutil::fig3_topology();
  const auto commodities = testutil::fig3_commodities(t);
  const auto classes = classes_for(t, 1);

  const BaselineResult r = solve_lp1_baseline(t, commodities, classes);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.total_demand == doctest::Approx(100.0));
  CHECK(r.routed == doctest::Approx(100.0).epsilon(1e-9));
  CHECK(r.fully_routed());
  CHECK_FALSE(r.stopped_early);
  // Every path detours through exactly one PM: source, entry switch, PM,
  // exit switch, destination.
  REQUIRE_FALSE(r.paths.empty());
  const double hop_cost = r.objective;
  CHECK(hop_cost == doctest::Approx(400.0).epsilon(1e-9));

  const auto sums = routed_per_commodity(r);
  CHECK(sums.at(0) == doctest::Approx(30.0).epsilon(1e-9));
  CHECK(sums.at(1) == doctest::Approx(70.0).epsilon(1e-9));

  for (const auto& p : r.paths) {
    REQUIRE(p.nodes.size() >= 3);
    CHECK(p.nodes.front() == commodities[p.commodity].source);
    CHECK(p.nodes.back() == commodities[p.commodity].dest);
    // Exactly one PM visit per path.
    int pm_visits = 0;
    for (int n : p.nodes) pm_visits += t.is_pm(n) ? 1 : 0;
    CHECK(pm_visits == 1);
  }

  // Rule accounting: destinations install nothing, the source pays one rule
  // per path that leaves it.
  const int s = t.node_index("s");
  CHECK(r.rule_counts.at(s) == static_cast<int>(r.paths.size()));
  CHECK(r.rule_counts.at(t.node_index("t1")) == 0);
  CHECK(r.rule_counts.at(t.node_index("t2")) == 0);

  // The decomposed paths reproduce a feasible routing.
  const auto flows = flows_from_paths(r.paths, t, static_cast<int>(commodities.size()));
  const VerificationReport report = verify_routing(t, commodities, classes, flows);
  CHECK(report.pass());
}

TEST_CASE("lp1 baseline feasibility probe skips path decomposition") {
  const Topology t = testutil::fig3_topology();
  const auto classes = classes_for(t, 1);

  SimplexOptions probe;
  probe.feasibility_only = true;

  SUBCASE("feasible load") {
    const BaselineResult r = solve_lp1_baseline(t, testutil::fig3_commodities(t), classes, probe);
    CHECK(r.status == SolveStatus::Optimal);
    CHECK(r.paths.empty());
  }
  SUBCASE("demand beyond the source cut") {
    auto commodities = testutil::fig3_commodities(t);
    commodities[0].demand = 90.0;  // 90 + 70 > 40 + 60 leaving s
    const BaselineResult r = solve_lp1_baseline(t, commodities, classes, probe);
    CHECK(r.status == SolveStatus::Infeasible);
    CHECK(r.paths.empty());
  }
}

TEST_CASE("lp1 baseline reports infeasibility with no paths") {
  const Topology t = testutil::fig3_topology();
  auto commodities = testutil::fig3_commodities(t);
  commodities[1].demand = 120.0;  // 30 + 120 > 100 leaving s
  const BaselineResult r = solve_lp1_baseline(t, commodities, classes_for(t, 1));
  CHECK(r.status == SolveStatus::Infeasible);
  CHECK(r.paths.empty());
  CHECK_FALSE(r.fully_routed());
}

TEST_CASE("greedy picks the nearest processing detour on the ring") {
  const Topology t = gen_fig1();
  std::vector<Commodity> commodities{{t.node_index("sw3"), t.node_index("sw4"), 5.0, 1}};
  const BaselineResult r = greedy_shortest_path(t, commodities, classes_for(t, 1));

  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.fully_routed());
  CHECK_FALSE(r.stopped_early);
  REQUIRE(r.paths.size() == 1);
  const CommodityPath& p = r.paths[0];
  CHECK(p.amount == doctest::Approx(5.0));

  // sw2 hosts the closest PM: one hop from the source, two hops back around
  // to sw4.  The walk revisits sw2 and sw3 on the way out.
  const int sw2 = t.node_index("sw2");
  REQUIRE(p.nodes.size() == 6);
  CHECK(p.nodes[0] == t.node_index("sw3"));
  CHECK(p.nodes[1] == sw2);
  CHECK(p.nodes[2] == t.attached_pm[sw2]);
  CHECK(p.nodes[3] == sw2);
  CHECK(p.nodes[4] == t.node_index("sw3"));
  CHECK(p.nodes[5] == t.node_index("sw4"));
}

TEST_CASE("greedy halves the grant when a one-way link serves both legs") {
  // Directed triangle s->a->b->s; the only PM sits at b.  Traffic s->a must
  // ride s->a on the outbound leg and again after the detour b->s->a, so the
  // 10-unit link supports only 5 units of demand.
  Topology t;
  const int s = testutil::add_switch(t, "s");
  const int a = testutil::add_switch(t, "a");
  const int b = testutil::add_switch(t, "b");
  testutil::add_link(t, s, a, 10.0, false);
  testutil::add_link(t, a, b, 10.0, false);
  testutil::add_link(t, b, s, 10.0, false);
  testutil::add_pm(t, "pm", b, 100.0);
  t.rebuild_index();
  REQUIRE(validate(t).empty());

  std::vector<Commodity> commodities{{s, a, 8.0, 1}};
  const BaselineResult r = greedy_shortest_path(t, commodities, classes_for(t, 1));

  CHECK(r.stopped_early);
  CHECK_FALSE(r.fully_routed());
  CHECK(r.routed == doctest::Approx(5.0));
  REQUIRE(r.paths.size() == 1);
  const std::vector<int> expected{s, a, b, t.attached_pm[b], b, s, a};
  CHECK(r.paths[0].nodes == expected);
  CHECK(r.paths[0].amount == doctest::Approx(5.0));
}

TEST_CASE("greedy stop policy: literal halt versus skipping stuck commodities") {
  // Star around h.  The s1-h link is the bottleneck: the big s1 commodity
  // drains it, the second s1 commodity strands, and only the skip policy
  // lets the s2 commodity have its turn.
  Topology t;
  const int h = testutil::add_switch(t, "h");
  const int s1 = testutil::add_switch(t, "s1");
  const int s2 = testutil::add_switch(t, "s2");
  const int dst = testutil::add_switch(t, "t");
  testutil::add_link(t, s1, h, 5.0);
  testutil::add_link(t, s2, h, 100.0);
  testutil::add_link(t, dst, h, 100.0);
  testutil::add_pm(t, "pm", h, 100.0);
  t.rebuild_index();
  REQUIRE(validate(t).empty());

  const std::vector<Commodity> commodities{
      {s1, dst, 4.0, 1},
      {s1, dst, 3.0, 1},
      {s2, dst, 2.0, 1},
  };
  const auto classes = classes_for(t, 1);

  SUBCASE("literal greedy halts everything at the first stuck commodity") {
    const BaselineResult r = greedy_shortest_path(t, commodities, classes);
    CHECK(r.stopped_early);
    CHECK(r.routed == doctest::Approx(5.0));
    const auto sums = routed_per_commodity(r);
    CHECK(sums.at(0) == doctest::Approx(4.0));
    CHECK(sums.at(1) == doctest::Approx(1.0));
    CHECK(sums.count(2) == 0);  // never attempted
  }
  SUBCASE("skip policy lets later commodities route") {
    GreedyOptions opt;
    opt.skip_stuck_commodities = true;
    const BaselineResult r = greedy_shortest_path(t, commodities, classes, opt);
    CHECK(r.stopped_early);
    CHECK(r.routed == doctest::Approx(7.0));
    const auto sums = routed_per_commodity(r);
    CHECK(sums.at(2) == doctest::Approx(2.0));
  }
}

TEST_CASE("greedy full routings survive independent verification") {
  const Topology t = testutil::fig3_topology();
  const auto commodities = testutil::fig3_commodities(t);
  const auto classes = classes_for(t, 1);

  const BaselineResult r = greedy_shortest_path(t, commodities, classes);
  REQUIRE(r.fully_routed());
  CHECK(r.routed == doctest::Approx(100.0));

  const auto flows = flows_from_paths(r.paths, t, static_cast<int>(commodities.size()));
  const VerificationReport report = verify_routing(t, commodities, classes, flows);
  CHECK(report.pass());
}

TEST_CASE("greedy never routes more than the relaxation allows") {
  // On seeded instances where greedy claims a full routing, the relaxed LP
  // must agree the load is feasible (its feasible set contains every path
  // assignment).
  for (unsigned seed : {1u, 2u, 3u}) {
    CAPTURE(seed);
    const Topology t = gen_fig1();
    const auto classes = classes_for(t, 1);
    const auto commodities = gen_random_commodities(t, 10, 1, 0.2, seed);
    const BaselineResult g = greedy_shortest_path(t, commodities, classes);
    if (!g.fully_routed()) continue;
    SimplexOptions probe;
    probe.feasibility_only = true;
    const BaselineResult lp = solve_lp1_baseline(t, commodities, classes, probe);
    CHECK(lp.status == SolveStatus::Optimal);
  }
}

TEST_CASE("path solutions round-trip through JSON") {
  const Topology t = testutil::fig3_topology();
  const auto commodities = testutil::fig3_commodities(t);
  const BaselineResult r = greedy_shortest_path(t, commodities, classes_for(t, 1));
  REQUIRE_FALSE(r.paths.empty());

  const std::string text = paths_to_json(r, "greedy", t);
  std::string algorithm;
  const BaselineResult back = paths_from_json(text, t, &algorithm);

  CHECK(algorithm == "greedy");
  CHECK(back.status == r.status);
  CHECK(back.stopped_early == r.stopped_early);
  CHECK(back.routed == doctest::Approx(r.routed).epsilon(1e-12));
  CHECK(back.total_demand == doctest::Approx(r.total_demand).epsilon(1e-12));
  REQUIRE(back.paths.size() == r.paths.size());
  for (std::size_t i = 0; i < r.paths.size(); ++i) {
    CHECK(back.paths[i].commodity == r.paths[i].commodity);
    CHECK(back.paths[i].nodes == r.paths[i].nodes);
    CHECK(back.paths[i].amount == doctest::Approx(r.paths[i].amount).epsilon(1e-12));
  }
  CHECK(back.rule_counts == r.rule_counts);

  CHECK_THROWS_AS((void)paths_from_json("not json", t), std::runtime_error);
  CHECK_THROWS_AS((void)paths_from_json("{}", t), std::runtime_error);
}
