#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "doctest.h"
#include "mptpt/pipeline.hpp"
#include "test_util.hpp"

using namespace mptpt;

namespace {

std::map<std::pair<int, int>, double> share_map(const std::vector<SharePair>& parts) {
  std::map<std::pair<int, int>, double> m;
  for (const SharePair& p : parts) m[{p.step1_tag, p.step2_tag}] += p.amount;
  return m;
}

bool same_routing(const RoutingSolution& a, const RoutingSolution& b) {
  if (a.status != b.status || a.num_classes != b.num_classes) return false;
  if (a.step1_trees.size() != b.step1_trees.size()) return false;
  if (a.step2_trees.size() != b.step2_trees.size()) return false;
  auto same_tree = [](const RoutedTree& x, const RoutedTree& y) {
    return x.tag == y.tag && x.root_class == y.root_class && x.root_switch == y.root_switch &&
           x.parent == y.parent && x.source_amounts == y.source_amounts;
  };
  for (std::size_t i = 0; i < a.step1_trees.size(); ++i)
    if (!same_tree(a.step1_trees[i], b.step1_trees[i])) return false;
  for (std::size_t i = 0; i < a.step2_trees.size(); ++i)
    if (!same_tree(a.step2_trees[i], b.step2_trees[i])) return false;
  if (a.commodity_shares.size() != b.commodity_shares.size()) return false;
  for (std::size_t i = 0; i < a.commodity_shares.size(); ++i)
    if (share_map(a.commodity_shares[i]) != share_map(b.commodity_shares[i])) return false;
  return true;
}

}  // namespace

TEST_CASE("the worked two-PM example end to end") {
  const Topology t = testutil::fig3_topology();
  const std::vector<Commodity> cs = testutil::fig3_commodities(t);
  const RoutingSolution sol = solve_mptpt(t, cs, classes_for(t, 1));

  REQUIRE(sol.status == PipelineStatus::Ok);
  CHECK(sol.failing_stage.empty());
  CHECK(sol.num_classes == 1);
  REQUIRE(sol.step1_trees.size() == 2);
  REQUIRE(sol.step2_trees.size() == 2);
  CHECK(sol.total_trees() == 4);

  const int s = t.node_index("s"), v1 = t.node_index("v1"), v2 = t.node_index("v2");
  const int t1 = t.node_index("t1"), t2 = t.node_index("t2");

  // Step-1 trees: tag 1 moves 40 through v1, tag 2 moves 60 through v2.
  const RoutedTree& a = sol.step1_trees[0];
  CHECK(a.tag == 1);
  CHECK(a.is_step1());
  CHECK(a.root_class == 1);
  CHECK(a.root_switch == -1);
  CHECK(a.source_amounts.at(s) == doctest::Approx(40.0).epsilon(1e-9));
  CHECK(a.parent.at(s) == t.find_edge(s, v1));
  CHECK(a.parent.at(v1) == t.pm_in_edge[t.attached_pm[v1]]);
  const RoutedTree& b = sol.step1_trees[1];
  CHECK(b.tag == 2);
  CHECK(b.source_amounts.at(s) == doctest::Approx(60.0).epsilon(1e-9));
  CHECK(b.parent.at(v2) == t.pm_in_edge[t.attached_pm[v2]]);

  // Step-2 trees: tag 3 roots at t1, tag 4 at t2, each fed from both PMs.
  const RoutedTree& c = sol.step2_trees[0];
  CHECK(c.tag == 3);
  CHECK(!c.is_step1());
  CHECK(c.root_switch == t1);
  CHECK(c.source_amounts.at(v1) == doctest::Approx(12.0).epsilon(1e-9));
  CHECK(c.source_amounts.at(v2) == doctest::Approx(18.0).epsilon(1e-9));
  CHECK(c.parent.at(v1) == t.find_edge(v1, t1));
  const RoutedTree& d = sol.step2_trees[1];
  CHECK(d.tag == 4);
  CHECK(d.root_switch == t2);
  CHECK(d.source_amounts.at(v1) == doctest::Approx(28.0).epsilon(1e-9));
  CHECK(d.source_amounts.at(v2) == doctest::Approx(42.0).epsilon(1e-9));

  // Shares: the 40/60 x 30/70 worked numbers, exact to 1e-12.
  REQUIRE(sol.commodity_shares.size() == 2);
  const auto m0 = share_map(sol.commodity_shares[0]);
  const auto m1 = share_map(sol.commodity_shares[1]);
  REQUIRE(m0.size() == 2);
  REQUIRE(m1.size() == 2);
  CHECK(std::abs(m0.at({1, 3}) - 12.0) < 1e-12);
  CHECK(std::abs(m0.at({2, 3}) - 18.0) < 1e-12);
  CHECK(std::abs(m1.at({1, 4}) - 28.0) < 1e-12);
  CHECK(std::abs(m1.at({2, 4}) - 42.0) < 1e-12);
  CHECK(testutil::share_total(sol.commodity_shares[0]) == doctest::Approx(30.0).epsilon(1e-12));
  CHECK(testutil::share_total(sol.commodity_shares[1]) == doctest::Approx(70.0).epsilon(1e-12));

  CHECK(sol.stats.step1_objective == doctest::Approx(200.0).epsilon(1e-9));
  CHECK(sol.stats.step2_objective == doctest::Approx(100.0).epsilon(1e-9));
  CHECK(sol.stats.step1_iterations > 0);
  CHECK(sol.stats.bound == theorem1_bound(t, 1, cs));
  CHECK(sol.total_trees() <= sol.stats.bound);
}

TEST_CASE("worst-case tree counts for the stock networks") {
  const Topology fig1 = gen_fig1();
  const Topology fat = gen_fat_tree();
  const Topology geant = load_topology(std::string(MPTPT_DATA_DIR) + "/geant.json");

  // C + 2|E0| + |V_T| - 2|V_pm| with every switch a potential destination.
  CHECK(theorem1_bound(fig1, 7) == 43);
  CHECK(theorem1_bound(fat, 7) == 137);
  CHECK(theorem1_bound(geant, 7) == 322);
  CHECK(theorem1_bound(fig1, 1) == 37);

  // Known commodities shrink |V_T| to the distinct destinations.
  const std::vector<Commodity> cs = {
      {fig1.node_index("sw1"), fig1.node_index("sw3"), 1.0, 1},
      {fig1.node_index("sw2"), fig1.node_index("sw3"), 1.0, 2},
      {fig1.node_index("sw1"), fig1.node_index("sw5"), 1.0, 1},
  };
  CHECK(theorem1_bound(fig1, 7, cs) == 7 + 36 + 2 - 6);
}

TEST_CASE("solution JSON round trip is lossless") {
  const Topology t = testutil::fig3_topology();
  const std::vector<Commodity> cs = testutil::fig3_commodities(t);
  const RoutingSolution sol = solve_mptpt(t, cs, classes_for(t, 1));
  REQUIRE(sol.status == PipelineStatus::Ok);

  const std::string text = solution_to_json(sol, t);
  const RoutingSolution back = solution_from_json(text, t);
  CHECK(same_routing(sol, back));
  CHECK(back.stats.bound == sol.stats.bound);

  CHECK_THROWS(solution_from_json("{\"form\":\"trees\"", t));  // truncated
  CHECK_THROWS(solution_from_json("[1,2,3]", t));
}

TEST_CASE("repeated solves are bit-for-bit deterministic") {
  const Topology t = gen_fig1();
  const std::vector<Commodity> cs = gen_random_commodities(t, 15, 3, 0.2, 99);
  const RoutingSolution one = solve_mptpt(t, cs, classes_for(t, 3));
  const RoutingSolution two = solve_mptpt(t, cs, classes_for(t, 3));
  REQUIRE(one.status == PipelineStatus::Ok);
  CHECK(same_routing(one, two));
}

TEST_CASE("step-1 infeasibility is named as such") {
  const Topology t = testutil::fig3_topology();
  const std::vector<Commodity> cs = {{t.node_index("s"), t.node_index("t1"), 150.0, 1},
                                     {t.node_index("s"), t.node_index("t2"), 50.0, 1}};
  const RoutingSolution sol = solve_mptpt(t, cs, classes_for(t, 1));
  CHECK(sol.status == PipelineStatus::Step1Infeasible);
  CHECK(sol.failing_stage == "step1");
  CHECK(sol.step1_trees.empty());
}

TEST_CASE("step-2 infeasibility: step 1 fits but the way home does not") {
  const Topology t = testutil::path_topology(10.0, 4.0);
  const std::vector<Commodity> cs = {{t.node_index("s"), t.node_index("t"), 8.0, 1}};
  const RoutingSolution sol = solve_mptpt(t, cs, classes_for(t, 1));
  CHECK(sol.status == PipelineStatus::Step2Infeasible);
  CHECK(sol.failing_stage == "step2");
  CHECK(!sol.step1_trees.empty());  // step 1 itself succeeded
}

TEST_CASE("no commodities, no trees, still ok") {
  const Topology t = gen_fig1();
  const RoutingSolution sol = solve_mptpt(t, {}, classes_for(t, 3));
  CHECK(sol.status == PipelineStatus::Ok);
  CHECK(sol.total_trees() == 0);
  CHECK(sol.commodity_shares.empty());
}

TEST_CASE("random instances respect the bound and conserve every demand") {
  const Topology t = gen_fig1();
  for (std::uint64_t seed : {11ull, 22ull, 33ull}) {
    const auto cs = gen_random_commodities(t, 20, 3, 0.2, seed);
    const RoutingSolution sol = solve_mptpt(t, cs, classes_for(t, 3));
    REQUIRE(sol.status == PipelineStatus::Ok);
    CHECK(sol.total_trees() <= sol.stats.bound);
    for (std::size_t i = 0; i < cs.size(); ++i) {
      CHECK(std::abs(testutil::share_total(sol.commodity_shares[i]) - cs[i].demand) <= 1e-7);
      for (const SharePair& p : sol.commodity_shares[i]) {
        CHECK(p.amount > 0.0);
        CHECK(p.step1_tag >= 1);
        CHECK(p.step2_tag > static_cast<int>(sol.step1_trees.size()));
      }
    }
  }
}

TEST_CASE("pipeline status names") {
  CHECK(std::string(to_string(PipelineStatus::Ok)) == "ok");
  CHECK(std::string(to_string(PipelineStatus::Step1Infeasible)) == "step1_infeasible");
  CHECK(std::string(to_string(PipelineStatus::Step2Infeasible)) == "step2_infeasible");
  CHECK(std::string(to_string(PipelineStatus::NumericalFailure)) == "numerical_failure");
}
