#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "mptpt/rng.hpp"
#include "mptpt/simplex.hpp"
#include "test_util.hpp"

using namespace mptpt;

namespace {

LpModel make_lp(int vars, std::vector<double> obj) {
  LpModel m;
  m.num_vars = vars;
  m.objective = std::move(obj);
  return m;
}

void add_row(LpModel& m, RowSense sense, double rhs,
             std::vector<std::pair<int, double>> coefs) {
  LpRow row;
  row.sense = sense;
  row.rhs = rhs;
  row.coefs = std::move(coefs);
  m.rows.push_back(std::move(row));
}

}  // namespace

TEST_CASE("two-variable maximization via negated costs") {
  LpModel m = make_lp(2, {-1.0, -2.0});
  add_row(m, RowSense::LessEqual, 4.0, {{0, 1.0}, {1, 1.0}});
  add_row(m, RowSense::LessEqual, 3.0, {{1, 1.0}});
  const BasicSolution s = simplex_solve(m);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.objective == doctest::Approx(-7.0));
  CHECK(s.values[0] == doctest::Approx(1.0));
  CHECK(s.values[1] == doctest::Approx(3.0));
  CHECK(s.positive_support() <= m.row_count());
  CHECK(check_basic_solution(m, s));
}

TEST_CASE("negative rhs rows pass through phase 1") {
  LpModel m = make_lp(2, {1.0, 1.0});
  add_row(m, RowSense::LessEqual, -1.0, {{0, -1.0}, {1, -1.0}});  // x1 + x2 >= 1
  const BasicSolution s = simplex_solve(m);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.objective == doctest::Approx(1.0));
  CHECK(check_basic_solution(m, s));
}

TEST_CASE("equality rows") {
  LpModel m = make_lp(2, {1.0, 0.0});
  add_row(m, RowSense::Equal, 2.0, {{0, 1.0}, {1, 1.0}});
  add_row(m, RowSense::Equal, 0.0, {{0, 1.0}, {1, -1.0}});
  const BasicSolution s = simplex_solve(m);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.values[0] == doctest::Approx(1.0));
  CHECK(s.values[1] == doctest::Approx(1.0));
  CHECK(check_basic_solution(m, s));
}

TEST_CASE("infeasible system is reported with its phase-1 mass") {
  LpModel m = make_lp(1, {0.0});
  add_row(m, RowSense::LessEqual, 1.0, {{0, 1.0}});
  add_row(m, RowSense::LessEqual, -2.0, {{0, -1.0}});  // x >= 2
  const BasicSolution s = simplex_solve(m);
  CHECK(s.status == SolveStatus::Infeasible);
  CHECK(s.infeasibility > 0.5);
}

TEST_CASE("unbounded directions are detected") {
  SUBCASE("free variable with negative cost") {
    LpModel m = make_lp(2, {-1.0, 0.0});
    add_row(m, RowSense::LessEqual, 1.0, {{1, 1.0}});
    CHECK(simplex_solve(m).status == SolveStatus::Unbounded);
  }
  SUBCASE("no rows at all") {
    LpModel none = make_lp(2, {-1.0, 1.0});
    CHECK(simplex_solve(none).status == SolveStatus::Unbounded);
    LpModel ok = make_lp(2, {1.0, 0.0});
    const BasicSolution s = simplex_solve(ok);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective == doctest::Approx(0.0));
  }
}

TEST_CASE("the classic cycling tableau terminates at its optimum") {
  // Beale's example: Dantzig pricing cycles on it without an anti-cycling rule.
  LpModel m = make_lp(4, {-0.75, 150.0, -0.02, 6.0});
  add_row(m, RowSense::LessEqual, 0.0, {{0, 0.25}, {1, -60.0}, {2, -0.04}, {3, 9.0}});
  add_row(m, RowSense::LessEqual, 0.0, {{0, 0.5}, {1, -90.0}, {2, -0.02}, {3, 3.0}});
  add_row(m, RowSense::LessEqual, 1.0, {{2, 1.0}});
  const BasicSolution s = simplex_solve(m);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.objective == doctest::Approx(-0.05));
  CHECK(check_basic_solution(m, s));
}

TEST_CASE("feasibility probes stop after phase 1") {
  LpModel m = make_lp(2, {5.0, 3.0});
  add_row(m, RowSense::LessEqual, -2.0, {{0, -1.0}, {1, -1.0}});  // x1 + x2 >= 2
  add_row(m, RowSense::LessEqual, 10.0, {{0, 1.0}, {1, 2.0}});
  SimplexOptions probe;
  probe.feasibility_only = true;
  const BasicSolution s = simplex_solve(m, probe);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.phase1_only);
  CHECK(s.values[0] + s.values[1] >= 2.0 - 1e-7);
  CHECK(s.values[0] + 2.0 * s.values[1] <= 10.0 + 1e-7);

  add_row(m, RowSense::LessEqual, 1.0, {{0, 1.0}, {1, 1.0}});  // contradicts the >=
  const BasicSolution bad = simplex_solve(m, probe);
  CHECK(bad.status == SolveStatus::Infeasible);
}

TEST_CASE("iteration budget exhaustion is a numerical failure, not a lie") {
  LpModel m = make_lp(3, {-1.0, -1.0, -1.0});
  add_row(m, RowSense::LessEqual, 3.0, {{0, 1.0}, {1, 1.0}, {2, 1.0}});
  add_row(m, RowSense::LessEqual, 2.0, {{0, 1.0}, {1, 2.0}});
  SimplexOptions tight;
  tight.max_iterations = 1;
  CHECK(simplex_solve(m, tight).status == SolveStatus::NumericalFailure);
}

TEST_CASE("certificate gate rejects doctored solutions") {
  LpModel m = make_lp(2, {-1.0, -2.0});
  add_row(m, RowSense::LessEqual, 4.0, {{0, 1.0}, {1, 1.0}});
  add_row(m, RowSense::LessEqual, 3.0, {{1, 1.0}});
  BasicSolution s = simplex_solve(m);
  REQUIRE(s.status == SolveStatus::Optimal);
  REQUIRE(check_basic_solution(m, s));

  SUBCASE("value outside a row") {
    s.values[0] = 5.0;
    std::string why;
    CHECK(!check_basic_solution(m, s, 1e-7, &why));
    CHECK(!why.empty());
  }
  SUBCASE("negative value") {
    s.values[0] = -0.5;
    CHECK(!check_basic_solution(m, s));
  }
  SUBCASE("misreported objective") {
    s.objective -= 1.0;
    CHECK(!check_basic_solution(m, s));
  }
}

TEST_CASE("positive support counts strictly positive entries") {
  BasicSolution s;
  s.values = {0.0, 1e-12, 0.5, 2.0};
  CHECK(s.positive_support() == 2);
}

TEST_CASE("random cross-check against the dense tableau oracle") {
  int optimal = 0, infeasible = 0, unbounded = 0;
  for (std::uint64_t seed = 1; seed <= 120; ++seed) {
    Rng rng(seed * 7919);
    const int n = 2 + static_cast<int>(rng.next_below(7));
    const int rows = 1 + static_cast<int>(rng.next_below(6));
    LpModel m;
    m.num_vars = n;
    m.objective.resize(n);
    for (double& c : m.objective) c = static_cast<double>(rng.next_in(-2, 4));
    for (int r = 0; r < rows; ++r) {
      LpRow row;
      row.sense = rng.next_below(4) == 0 ? RowSense::Equal : RowSense::LessEqual;
      row.rhs = static_cast<double>(rng.next_in(-5, 10));
      for (int j = 0; j < n; ++j) {
        if (rng.next_unit() > 0.6) continue;
        const double v = static_cast<double>(rng.next_in(-3, 3));
        if (v != 0.0) row.coefs.push_back({j, v});
      }
      if (row.coefs.empty()) row.coefs.push_back({static_cast<int>(rng.next_below(n)), 1.0});
      m.rows.push_back(std::move(row));
    }

    const BasicSolution mine = simplex_solve(m);
    const testutil::OracleResult ref = testutil::oracle_solve(m);
    INFO("seed ", seed);
    REQUIRE(mine.status == ref.status);
    if (mine.status == SolveStatus::Optimal) {
      ++optimal;
      CHECK(std::abs(mine.objective - ref.objective) <=
            1e-6 * std::max(1.0, std::abs(ref.objective)));
      CHECK(check_basic_solution(m, mine));
      CHECK(mine.positive_support() <= m.row_count());
    } else if (mine.status == SolveStatus::Infeasible) {
      ++infeasible;
    } else {
      ++unbounded;
    }
  }
  // The generator must actually exercise all three verdicts.
  CHECK(optimal >= 20);
  CHECK(infeasible >= 10);
  CHECK(unbounded >= 10);
}
