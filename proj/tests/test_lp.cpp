#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fjvrp/lp.hpp"
#include "fjvrp/rng.hpp"
#include "oracles.hpp"

using namespace fjvrp;

namespace {

LpProblem random_problem(Rng& rng) {
  LpProblem p;
  p.var_count = 1 + static_cast<int>(rng.below(4));
  for (int j = 0; j < p.var_count; ++j)
    p.objective.push_back(static_cast<double>(rng.below(11)) - 5.0);

  int n_eq = static_cast<int>(rng.below(2));
  int n_le = 1 + static_cast<int>(rng.below(3));
  auto random_row = [&] {
    LinearRow row;
    for (int j = 0; j < p.var_count; ++j)
      row.a.push_back(static_cast<double>(rng.below(9)) - 4.0);
    return row;
  };
  for (int e = 0; e < n_eq; ++e) {
    LinearRow row = random_row();
    if (rng.unit() < 0.7) {
      // anchor the rhs at a random box point so many instances are feasible
      row.b = 0.0;
      for (int j = 0; j < p.var_count; ++j)
        row.b += row.a[j] * (0.5 * static_cast<double>(rng.below(3)));
    } else {
      row.b = static_cast<double>(rng.below(7)) - 3.0;
    }
    p.eq_rows.push_back(std::move(row));
  }
  for (int r = 0; r < n_le; ++r) {
    LinearRow row = random_row();
    row.b = static_cast<double>(rng.below(9)) - 2.0;
    p.le_rows.push_back(std::move(row));
  }
  return p;
}

void check_solution_invariants(const LpProblem& p, const LpSolution& sol) {
  REQUIRE(sol.values.size() == static_cast<std::size_t>(p.var_count));
  for (double v : sol.values) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  for (const auto& row : p.eq_rows) {
    double lhs = 0.0;
    for (int j = 0; j < p.var_count; ++j) lhs += row.a[j] * sol.values[j];
    CHECK(std::abs(lhs - row.b) <= 1e-9 * (1.0 + std::abs(row.b)) + 1e-9);
  }
  for (const auto& row : p.le_rows) {
    double lhs = 0.0;
    for (int j = 0; j < p.var_count; ++j) lhs += row.a[j] * sol.values[j];
    CHECK(lhs <= row.b + 1e-9 * (1.0 + std::abs(row.b)) + 1e-9);
  }

  // basic columns form an exact identity submatrix
  const auto& tab = sol.tableau;
  for (int i = 0; i < tab.row_count(); ++i) {
    CHECK(tab.rhs[i] >= -kFeasTol);
    for (int k = 0; k < tab.row_count(); ++k)
      CHECK(tab.rows[k][tab.basis[i]] == (k == i ? 1.0 : 0.0));
  }
}

}  // namespace

TEST_CASE("solve_lp pins a variable through an equality row") {
  LpProblem p;
  p.var_count = 1;
  p.objective = {1.0};
  p.eq_rows = {{{1.0}, 1.0}};
  LpSolution sol = solve_lp(p);
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.objective == Catch::Approx(1.0).margin(1e-9));
  CHECK(sol.values[0] == Catch::Approx(1.0).margin(1e-9));
  check_solution_invariants(p, sol);
}

TEST_CASE("solve_lp saturates a symmetric knapsack row") {
  LpProblem p;
  p.var_count = 2;
  p.objective = {-1.0, -1.0};
  p.le_rows = {{{1.0, 1.0}, 1.0}};
  LpSolution sol = solve_lp(p);
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.objective == Catch::Approx(-1.0).margin(1e-9));
  check_solution_invariants(p, sol);
}

TEST_CASE("solve_lp finds box optima without rows") {
  LpProblem p;
  p.var_count = 2;
  p.objective = {-3.0, 2.0};
  LpSolution sol = solve_lp(p);
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.objective == Catch::Approx(-3.0).margin(1e-9));
  CHECK(sol.values[0] == Catch::Approx(1.0).margin(1e-9));
  CHECK(sol.values[1] == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("solve_lp reports infeasibility") {
  SECTION("contradictory constant row") {
    LpProblem p;
    p.var_count = 1;
    p.objective = {0.0};
    p.eq_rows = {{{0.0}, 5.0}};
    CHECK(solve_lp(p).status == LpStatus::infeasible);
  }
  SECTION("equality beyond the box") {
    LpProblem p;
    p.var_count = 1;
    p.objective = {0.0};
    p.eq_rows = {{{1.0}, 2.0}};
    CHECK(solve_lp(p).status == LpStatus::infeasible);
  }
  SECTION("negative-rhs inequality out of reach") {
    LpProblem p;
    p.var_count = 2;
    p.objective = {0.0, 0.0};
    p.le_rows = {{{1.0, 1.0}, -1.0}};
    CHECK(solve_lp(p).status == LpStatus::infeasible);
  }
}

TEST_CASE("solve_lp matches vertex enumeration on random problems") {
  Rng rng(101);
  int optima_checked = 0;
  for (int t = 0; t < 60; ++t) {
    LpProblem p = random_problem(rng);
    LpSolution sol = solve_lp(p);
    oracle::LpReference ref = oracle::lp_by_vertex_enumeration(p);
    if (ref.feasible) {
      REQUIRE(sol.status == LpStatus::optimal);
      CHECK(std::abs(sol.objective - ref.objective) <= 1e-7);
      check_solution_invariants(p, sol);
      ++optima_checked;
    } else {
      REQUIRE(sol.status == LpStatus::infeasible);
    }
  }
  CHECK(optima_checked >= 20);
}

TEST_CASE("solve_lp is deterministic") {
  Rng rng(55);
  for (int t = 0; t < 20; ++t) {
    LpProblem p = random_problem(rng);
    LpSolution a = solve_lp(p);
    LpSolution b = solve_lp(p);
    REQUIRE(a.status == b.status);
    if (a.status != LpStatus::optimal) continue;
    CHECK(a.values == b.values);
    CHECK(a.tableau.basis == b.tableau.basis);
    CHECK(a.objective == b.objective);
  }
}

TEST_CASE("resolve_with_cut tightens a fractional knapsack") {
  LpProblem p;
  p.var_count = 2;
  p.objective = {-1.0, -1.0};
  p.le_rows = {{{2.0, 2.0}, 3.0}};
  LpSolution root = solve_lp(p);
  REQUIRE(root.status == LpStatus::optimal);
  CHECK(root.objective == Catch::Approx(-1.5).margin(1e-9));

  CutRow cut{{1.0, 1.0}, 1.0};  // valid for both binary feasible points
  LpSolution tightened = resolve_with_cut(root, cut);
  REQUIRE(tightened.status == LpStatus::optimal);
  CHECK(tightened.objective > root.objective + 1e-6);
  CHECK(tightened.objective == Catch::Approx(-1.0).margin(1e-9));

  // warm restart equals the cold solve of problem + cut
  LpProblem with_cut = p;
  with_cut.le_rows.push_back(cut);
  LpSolution cold = solve_lp(with_cut);
  REQUIRE(cold.status == LpStatus::optimal);
  CHECK(std::abs(tightened.objective - cold.objective) <= 1e-7);
  check_solution_invariants(with_cut, tightened);
}

TEST_CASE("resolve_with_cut rejects satisfied cuts") {
  LpProblem p;
  p.var_count = 2;
  p.objective = {-1.0, -1.0};
  p.le_rows = {{{1.0, 1.0}, 1.0}};
  LpSolution sol = solve_lp(p);
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK_THROWS_AS(resolve_with_cut(sol, CutRow{{1.0, 1.0}, 2.0}),
                  CutNotViolated);
}

TEST_CASE("resolve_with_cut reports an emptied region") {
  LpProblem p;
  p.var_count = 2;
  p.objective = {-1.0, -1.0};
  p.le_rows = {{{1.0, 1.0}, 1.0}};
  LpSolution sol = solve_lp(p);
  REQUIRE(sol.status == LpStatus::optimal);
  LpSolution after = resolve_with_cut(sol, CutRow{{1.0, 1.0}, -1.0});
  CHECK(after.status == LpStatus::infeasible);
}

TEST_CASE("resolve_with_cut equals cold solve on random cuts") {
  Rng rng(202);
  int checked = 0;
  for (int t = 0; t < 80 && checked < 30; ++t) {
    LpProblem p = random_problem(rng);
    LpSolution sol = solve_lp(p);
    if (sol.status != LpStatus::optimal) continue;

    CutRow cut;
    for (int j = 0; j < p.var_count; ++j)
      cut.a.push_back(static_cast<double>(rng.below(9)) - 4.0);
    double at_opt = 0.0;
    for (int j = 0; j < p.var_count; ++j) at_opt += cut.a[j] * sol.values[j];
    cut.b = at_opt - 0.25 - rng.unit();  // violated by construction

    LpSolution warm = resolve_with_cut(sol, cut);
    LpProblem with_cut = p;
    with_cut.le_rows.push_back(cut);
    LpSolution cold = solve_lp(with_cut);
    REQUIRE(warm.status == cold.status);
    if (warm.status == LpStatus::optimal) {
      CHECK(std::abs(warm.objective - cold.objective) <= 1e-7);
      CHECK(warm.objective >= sol.objective - 1e-9);
      check_solution_invariants(with_cut, warm);
    }
    ++checked;
  }
  CHECK(checked == 30);
}
