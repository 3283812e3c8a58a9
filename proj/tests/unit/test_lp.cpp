#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tramp/milp.hpp"

using namespace tramp;

namespace {

MilpProblem random_problem(std::mt19937_64& rng, int n, int m, bool integer) {
  std::uniform_int_distribution<int> coef(-6, 9);
  std::uniform_int_distribution<int> cost(-10, 10);
  std::uniform_int_distribution<int> kind(0, 2);
  MilpProblem p;
  for (int j = 0; j < n; ++j) p.add_col(cost(rng), 0.0, 3.0 + j % 3, integer && j % 2 == 0);
  for (int i = 0; i < m; ++i) {
    std::vector<std::pair<int, double>> terms;
    double lhs_at_one = 0.0;
    for (int j = 0; j < n; ++j) {
      const int a = coef(rng);
      if (a == 0) continue;
      terms.emplace_back(j, a);
      lhs_at_one += a;
    }
    if (terms.empty()) continue;
    switch (kind(rng)) {
      case 0:
        p.add_row(terms, -kInf, lhs_at_one + 4.0);
        break;
      case 1:
        p.add_row(terms, lhs_at_one - 5.0, kInf);
        break;
      default:
        p.add_row(terms, lhs_at_one - 3.0, lhs_at_one + 3.0);
        break;
    }
  }
  return p;
}

}  // namespace

TEST_CASE("dual simplex matches vertex enumeration") {
  std::mt19937_64 rng(11);
  int feasible = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const int n = 2 + trial % 4;
    const int m = 1 + trial % 4;
    const auto p = random_problem(rng, n, m, false);
    const auto ref = oracle::enumerate_vertices(p);
    lp::DualSimplex ds(p);
    const auto st = ds.solve();
    if (!ref.feasible) {
      CHECK(st == lp::Status::infeasible);
      continue;
    }
    ++feasible;
    REQUIRE(st == lp::Status::optimal);
    CHECK(ds.objective() == doctest::Approx(ref.objective).epsilon(1e-7).scale(1.0));
    CHECK(p.max_violation(ds.col_values()) < 1e-6);
  }
  CHECK(feasible > 50);
}

TEST_CASE("branch and bound matches exhaustive enumeration") {
  std::mt19937_64 rng(23);
  int feasible = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const int n = 3 + trial % 4;
    const int m = 2 + trial % 3;
    const auto p = random_problem(rng, n, m, true);
    const auto ref = oracle::enumerate_milp(p);
    REQUIRE_FALSE(ref.leaf_limit_hit);
    const auto got = solve_milp(p);
    if (!ref.feasible) {
      CHECK(got.status == MilpStatus::infeasible);
      continue;
    }
    ++feasible;
    REQUIRE(got.status == MilpStatus::optimal);
    CHECK(got.objective == doctest::Approx(ref.objective).epsilon(1e-7).scale(1.0));
    CHECK(p.max_violation(got.x) < 1e-6);
    CHECK(p.max_integrality_violation(got.x) < 1e-6);
  }
  CHECK(feasible > 40);
}

TEST_CASE("lp detects infeasible and unbounded problems") {
  MilpProblem inf;
  const int a = inf.add_col(1.0, 0.0, 10.0, false);
  const int b = inf.add_col(1.0, 0.0, 10.0, false);
  inf.add_row({{a, 1.0}, {b, 1.0}}, 25.0, kInf);
  lp::DualSimplex d1(inf);
  CHECK(d1.solve() == lp::Status::infeasible);

  MilpProblem unb;
  const int x = unb.add_col(-1.0, 0.0, kInf, false);
  const int y = unb.add_col(0.0, 0.0, kInf, false);
  unb.add_row({{x, 1.0}, {y, -1.0}}, -kInf, 2.0);
  lp::DualSimplex d2(unb);
  CHECK(d2.solve() == lp::Status::unbounded);
}

TEST_CASE("bound changes and warm starts") {
  MilpProblem p;
  const int x = p.add_col(-3.0, 0.0, 4.0, false);
  const int y = p.add_col(-2.0, 0.0, 4.0, false);
  p.add_row({{x, 1.0}, {y, 1.0}}, -kInf, 5.0);
  p.add_row({{x, 2.0}, {y, 1.0}}, -kInf, 8.0);
  lp::DualSimplex ds(p);
  REQUIRE(ds.solve() == lp::Status::optimal);
  CHECK(ds.objective() == doctest::Approx(-13.0));
  const auto basis = ds.basis();
  ds.set_col_bounds(x, 0.0, 2.0);
  REQUIRE(ds.solve() == lp::Status::optimal);
  CHECK(ds.objective() == doctest::Approx(-12.0));
  lp::DualSimplex again(p);
  again.load_basis(basis);
  REQUIRE(again.solve() == lp::Status::optimal);
  CHECK(again.objective() == doctest::Approx(-13.0));
  CHECK(again.iterations() <= 1);
}

TEST_CASE("knapsack with a fractional relaxation") {
  MilpProblem p;
  const double w[] = {5, 4, 3, 2};
  const double v[] = {10, 7, 5, 3};
  std::vector<std::pair<int, double>> row;
  for (int j = 0; j < 4; ++j) row.emplace_back(p.add_col(-v[j], 0.0, 1.0, true), w[j]);
  p.add_row(row, -kInf, 9.0);
  const auto relax = solve_lp_relaxation(p);
  const auto opt = solve_milp(p);
  REQUIRE(opt.status == MilpStatus::optimal);
  CHECK(opt.objective == doctest::Approx(-17.0));
  CHECK(relax.objective <= opt.objective + 1e-9);
  CHECK(opt.bound <= opt.objective + 1e-9);
}
