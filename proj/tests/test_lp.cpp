#include <doctest.h>

#include <random>

#include "basketbounds/lp.hpp"
#include "oracles.hpp"

using namespace basketbounds::lp;

TEST_CASE("max x with x <= 3 is optimal at 3") {
  LinearProgram lp(Direction::Maximize);
  const int x = lp.add_variable(0.0, kInf, 1.0);
  lp.add_row({{x, 1.0}}, RowType::LessEqual, 3.0);
  const auto sol = solve(lp);
  REQUIRE(sol.status == Status::Optimal);
  CHECK(sol.x[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(sol.objective == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("max x with only x >= 0 is unbounded") {
  LinearProgram lp(Direction::Maximize);
  lp.add_variable(0.0, kInf, 1.0);
  CHECK(solve(lp).status == Status::Unbounded);
}

TEST_CASE("x <= -1 with x >= 0 is infeasible") {
  LinearProgram lp;
  const int x = lp.add_variable(0.0, kInf, 1.0);
  lp.add_row({{x, 1.0}}, RowType::LessEqual, -1.0);
  CHECK(solve(lp).status == Status::Infeasible);
}

TEST_CASE("equality rows, free and boxed columns") {
  // min x + 2y - z  s.t. x + y + z = 4, x - y <= 1, y free, 0 <= z <= 1.5, x >= 0
  LinearProgram lp;
  const int x = lp.add_variable(0.0, kInf, 1.0);
  const int y = lp.add_variable(-kInf, kInf, 2.0);
  const int z = lp.add_variable(0.0, 1.5, -1.0);
  lp.add_row({{x, 1.0}, {y, 1.0}, {z, 1.0}}, RowType::Equal, 4.0);
  lp.add_row({{x, 1.0}, {y, -1.0}}, RowType::LessEqual, 1.0);
  const auto sol = solve(lp);
  REQUIRE(sol.optimal());
  // Eliminating x gives 4 + y - 2z with y >= (3 - z) / 2, so z = 1.5, y = 0.75, x = 1.75.
  CHECK(sol.objective == doctest::Approx(1.75).epsilon(1e-12));
  CHECK(sol.x[static_cast<std::size_t>(y)] == doctest::Approx(0.75));
  CHECK(sol.x[static_cast<std::size_t>(z)] == doctest::Approx(1.5));
  CHECK(primal_residual(lp, sol.x) <= 1e-10);
}

TEST_CASE("Klee-Minty cube in dimension 6") {
  const int n = 6;
  LinearProgram lp(Direction::Maximize);
  for (int j = 0; j < n; ++j) lp.add_variable(0.0, kInf, std::pow(2.0, n - 1 - j));
  for (int i = 0; i < n; ++i) {
    std::vector<Term> row;
    for (int j = 0; j < i; ++j) row.push_back({j, std::pow(2.0, i - j + 1)});
    row.push_back({i, 1.0});
    lp.add_row(std::move(row), RowType::LessEqual, std::pow(5.0, i + 1));
  }
  const auto sol = solve(lp);
  REQUIRE(sol.optimal());
  CHECK(sol.objective == doctest::Approx(std::pow(5.0, n)).epsilon(1e-12));
}

TEST_CASE("degenerate vertex does not cycle") {
  // Beale's example.
  LinearProgram lp;
  const int x1 = lp.add_variable(0.0, kInf, -0.75);
  const int x2 = lp.add_variable(0.0, kInf, 150.0);
  const int x3 = lp.add_variable(0.0, kInf, -0.02);
  const int x4 = lp.add_variable(0.0, kInf, 6.0);
  lp.add_row({{x1, 0.25}, {x2, -60.0}, {x3, -0.04}, {x4, 9.0}}, RowType::LessEqual, 0.0);
  lp.add_row({{x1, 0.5}, {x2, -90.0}, {x3, -0.02}, {x4, 3.0}}, RowType::LessEqual, 0.0);
  lp.add_row({{x3, 1.0}}, RowType::LessEqual, 1.0);
  const auto sol = solve(lp);
  REQUIRE(sol.optimal());
  CHECK(sol.objective == doctest::Approx(-0.05).epsilon(1e-12));
}

TEST_CASE("random bounded programs agree with vertex enumeration") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = 2 + trial % 3, m = 2 + trial % 4;
    Eigen::MatrixXd a(m + 1, n);
    Eigen::VectorXd b(m + 1), c(n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = u(rng);
      b[i] = u(rng) + 0.3;
    }
    a.row(m).setOnes();  // keeps the feasible set bounded
    b[m] = 5.0;
    for (int j = 0; j < n; ++j) c[j] = u(rng);

    LinearProgram lp;
    for (int j = 0; j < n; ++j) lp.add_variable(0.0, kInf, c[j]);
    for (int i = 0; i <= m; ++i) {
      std::vector<Term> row;
      for (int j = 0; j < n; ++j) row.push_back({j, a(i, j)});
      lp.add_row(std::move(row), RowType::LessEqual, b[i]);
    }
    const auto expected = oracle::vertex_min(a, b, c);
    const auto sol = solve(lp);
    if (!expected) {
      CHECK(sol.status == Status::Infeasible);
      continue;
    }
    REQUIRE(sol.optimal());
    CHECK(sol.objective == doctest::Approx(*expected).epsilon(1e-9));
    CHECK(primal_residual(lp, sol.x) <= 1e-8);
    CHECK(complementarity_residual(lp, sol) <= 1e-6);
    CHECK(std::abs(dual_objective(lp, sol) - sol.objective) <= 1e-6);
  }
}

TEST_CASE("dual bounds the primal in both directions") {
  // max 3x + 2y  s.t. x + y <= 4, x + 3y <= 9, x <= 3
  LinearProgram lp(Direction::Maximize);
  const int x = lp.add_variable(0.0, kInf, 3.0);
  const int y = lp.add_variable(0.0, kInf, 2.0);
  lp.add_row({{x, 1.0}, {y, 1.0}}, RowType::LessEqual, 4.0);
  lp.add_row({{x, 1.0}, {y, 3.0}}, RowType::LessEqual, 9.0);
  lp.add_row({{x, 1.0}}, RowType::LessEqual, 3.0);
  const auto sol = solve(lp);
  REQUIRE(sol.optimal());
  CHECK(sol.objective == doctest::Approx(11.0));
  CHECK(dual_objective(lp, sol) >= sol.objective - 1e-9);
  // d objective / d rhs: the first and third rows bind with shadow prices 2 and 1.
  CHECK(sol.row_duals[0] == doctest::Approx(2.0));
  CHECK(sol.row_duals[1] == doctest::Approx(0.0));
  CHECK(sol.row_duals[2] == doctest::Approx(1.0));

  lp.set_direction(Direction::Minimize);
  lp.set_cost(x, 1.0);
  lp.set_cost(y, 1.0);
  lp.add_row({{x, 1.0}, {y, 1.0}}, RowType::GreaterEqual, 1.0);
  const auto low = solve(lp);
  REQUIRE(low.optimal());
  CHECK(low.objective == doctest::Approx(1.0));
  CHECK(dual_objective(lp, low) <= low.objective + 1e-9);
}

TEST_CASE("re-solving is bit-identical") {
  LinearProgram lp(Direction::Maximize);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  for (int j = 0; j < 12; ++j) lp.add_variable(0.0, kInf, u(rng));
  for (int i = 0; i < 8; ++i) {
    std::vector<Term> row;
    for (int j = 0; j < 12; ++j) row.push_back({j, u(rng)});
    lp.add_row(std::move(row), RowType::LessEqual, 1.0 + u(rng));
  }
  const auto a = solve(lp), b = solve(lp);
  REQUIRE(a.optimal());
  CHECK(a.objective == b.objective);
  CHECK(a.x == b.x);
}

TEST_CASE("inconsistent equalities are infeasible") {
  LinearProgram lp;
  const int x = lp.add_variable(-kInf, kInf);
  const int y = lp.add_variable(-kInf, kInf);
  lp.add_row({{x, 1.0}, {y, 1.0}}, RowType::Equal, 1.0);
  lp.add_row({{x, 2.0}, {y, 2.0}}, RowType::Equal, 3.0);
  CHECK(solve(lp).status == Status::Infeasible);
}

TEST_CASE("redundant equalities are handled") {
  LinearProgram lp;
  const int x = lp.add_variable(0.0, kInf, 1.0);
  const int y = lp.add_variable(0.0, kInf, 1.0);
  lp.add_row({{x, 1.0}, {y, 1.0}}, RowType::Equal, 2.0);
  lp.add_row({{x, 2.0}, {y, 2.0}}, RowType::Equal, 4.0);
  lp.add_row({{x, 1.0}, {y, -1.0}}, RowType::Equal, 0.0);
  const auto sol = solve(lp);
  REQUIRE(sol.optimal());
  CHECK(sol.x[0] == doctest::Approx(1.0));
  CHECK(sol.x[1] == doctest::Approx(1.0));
}

TEST_CASE("free column driving the objective down is unbounded") {
  LinearProgram lp;
  const int x = lp.add_variable(0.0, kInf, 1.0);
  const int y = lp.add_variable(-kInf, kInf, 2.0);
  lp.add_row({{x, 1.0}, {y, 1.0}}, RowType::Equal, 4.0);
  lp.add_row({{x, 1.0}, {y, -1.0}}, RowType::GreaterEqual, -1.0);
  CHECK(solve(lp).status == Status::Unbounded);
}
