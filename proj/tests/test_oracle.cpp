#include <doctest.h>

#include <random>

#include "fps/oracle.hpp"
#include "fps/solver.hpp"
#include "test_util.hpp"

using namespace fps;
using namespace fps::testutil;

namespace {

std::vector<std::vector<Rational>> rat_rows(const std::vector<std::vector<long>>& rows) {
  std::vector<std::vector<Rational>> out;
  for (const auto& r : rows) {
    std::vector<Rational> v;
    for (long x : r) v.emplace_back(x);
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

TEST_CASE("oracle reproduces the Euler family with a chosen free value") {
  Problem p = make_problem({"x*y(1) - 3*y(0)"}, 1, 1);
  std::map<long, std::vector<Rational>> free_vals;
  free_vals[3] = {Rational(1)};
  auto res = brute_force_solve(p, rat_rows({{0}, {0}, {0}}), 11, free_vals);
  REQUIRE(res.feasible);
  // c_3 is the structural free slot; the top coefficient c_11 stays
  // undetermined because its order condition lies beyond the table.
  REQUIRE(!res.free_indices.empty());
  CHECK(res.free_indices[0] == 3);
  for (long idx : res.free_indices) CHECK((idx == 3 || idx > 10));
  for (int i = 0; i <= 10; ++i)
    CHECK(res.coefficients[i][0] == (i == 3 ? Rational(1) : Rational(0)));
}

TEST_CASE("oracle solves the exponential recursion") {
  Problem p = make_problem({"y(1) - y(0)"}, 1, 1);
  auto res = brute_force_solve(p, rat_rows({{1}, {1}}), 9);
  REQUIRE(res.feasible);
  CHECK(res.free_indices.empty());
  for (const auto& c : res.coefficients) CHECK(c[0] == Rational(1));
}

TEST_CASE("oracle confirms the parabola branch") {
  Problem p = make_problem({"y(1)^2 - 4*y(0)"}, 1, 1);
  auto res = brute_force_solve(p, rat_rows({{0}, {0}, {2}}), 13);
  REQUIRE(res.feasible);
  for (std::size_t i = 3; i < res.coefficients.size(); ++i)
    CHECK(res.coefficients[i][0] == Rational(0));
}

TEST_CASE("oracle reports infeasibility with the witness order") {
  Problem p = make_problem({"x*y(1) - 3*y(0) - x^3"}, 1, 1);
  auto res = brute_force_solve(p, rat_rows({{0}, {0}, {0}}), 8);
  CHECK(!res.feasible);
  CHECK(res.failure_order == 3);
  CHECK(res.failure_magnitude == doctest::Approx(6.0));
}

TEST_CASE("oracle restarts when a later condition pins an earlier coefficient") {
  Problem p = make_problem({"x*y(1)[0] - 3*y(0)[0]", "x*y(1)[1] - 5*y(0)[1] + x^2*y(0)[0]"}, 1, 2);
  std::map<long, std::vector<Rational>> free_vals;
  free_vals[3] = {Rational(4), Rational(0)};  // wrong guess for the pinned slot
  auto res = brute_force_solve(p, rat_rows({{0, 0}, {0, 0}, {0, 0}}), 9, free_vals);
  REQUIRE(res.feasible);
  CHECK(res.coefficients[3][0] == Rational(0));  // later solvability forces zero
}

TEST_CASE("oracle agrees with the solver on the cosh/sinh system") {
  Problem p = make_problem({"y(1)[0] - y(0)[1]", "y(1)[1] - y(0)[0]"}, 1, 2);
  auto base = rat_rows({{1, 0}, {0, 1}});
  auto res = brute_force_solve(p, base, 9);
  REQUIRE(res.feasible);

  SolveOptions<Rational> opts;
  opts.m = 0;
  opts.order = 8;
  auto out = solve_regular(p, JetPoint<Rational>(1, 2, base), opts);
  REQUIRE(out.ok());
  for (std::size_t i = 0; i < out.family->coefficients.size(); ++i)
    for (int c = 0; c < 2; ++c)
      CHECK(res.coefficients[i][c] == out.family->coefficients[i][c]);
}

TEST_CASE("oracle agrees with the solver on randomized nondegenerate systems") {
  std::mt19937 rng(81);
  std::uniform_int_distribution<long> dist(-2, 2);
  int done = 0;
  while (done < 12) {
    int n = 1 + static_cast<int>(rng() % 2);
    int d = 1 + static_cast<int>(rng() % 2);
    // explicit top derivative: y^{(n)}_q = P_q(lower data) keeps the lead block
    // invertible, so both paths are defined
    std::vector<ExprPtr> eqs;
    for (int q = 0; q < d; ++q) {
      ExprPtr rhs = random_polynomial_component(rng, n - 1, d, 2);
      eqs.push_back(make_binary(ExprKind::Sub, make_var_y(n, q), rhs));
    }
    Problem p;
    p.deriv_order_n = n;
    p.dim_d = d;
    p.num_eqs_r = d;
    p.field = FieldMode::RationalExact;
    p.equations = eqs;
    validate_problem(p);

    // base: c_0..c_{n-1} random, top block c_n chosen to satisfy G[z0] = 0
    std::vector<std::vector<Rational>> base(n + 1, std::vector<Rational>(d));
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < d; ++c) base[i][c] = Rational(dist(rng));
    EvalEnv<Rational> env;
    env.d = d;
    env.x = Rational(0);
    for (int j = 0; j <= n; ++j)
      for (int c = 0; c < d; ++c)
        env.y.push_back(j < n ? base[j][c] : Rational(0));
    for (int q = 0; q < d; ++q) {
      // G_q = y(n)[q] - P_q with P_q free of y(n): solve directly
      Rational rhs = -eval_expr(*p.equations[q], env);
      base[n][q] = rhs;
    }

    const int order = 6;
    SolveOptions<Rational> opts;
    opts.m = 0;
    opts.order = order;
    auto out = solve_regular(p, JetPoint<Rational>(n, d, base), opts);
    REQUIRE(out.ok());
    auto res = brute_force_solve(p, base, order + n);
    REQUIRE(res.feasible);
    CHECK(res.free_indices.empty());
    for (std::size_t i = 0; i < out.family->coefficients.size(); ++i)
      for (int c = 0; c < d; ++c)
        CHECK(res.coefficients[i][c] == out.family->coefficients[i][c]);
    ++done;
  }
}

TEST_CASE("oracle agrees with the solver on randomized degenerate scalar instances") {
  std::mt19937 rng(82);
  for (long lambda = 3; lambda <= 6; ++lambda) {
    Problem p;
    p.deriv_order_n = 1;
    p.dim_d = 1;
    p.num_eqs_r = 1;
    p.field = FieldMode::RationalExact;
    p.equations = {make_binary(
        ExprKind::Sub, make_binary(ExprKind::Mul, make_var_x(), make_var_y(1, 0)),
        make_binary(ExprKind::Mul, make_constant(Rational(lambda)), make_var_y(0, 0)))};
    validate_problem(p);
    auto base = rat_rows({{0}, {0}, {0}});

    SolveOptions<Rational> opts;
    opts.m = 1;
    opts.order = 9;
    long slot = lambda;  // free coefficient sits at index lambda
    opts.free_parameters[slot] = {Rational(2)};
    auto out = solve(p, JetPoint<Rational>(1, 1, base), opts);
    REQUIRE(out.ok());
    std::map<long, std::vector<Rational>> free_vals;
    free_vals[slot] = {Rational(2)};
    auto res = brute_force_solve(p, base, 10, free_vals);
    REQUIRE(res.feasible);
    for (std::size_t i = 0; i < out.family->coefficients.size(); ++i)
      CHECK(res.coefficients[i][0] == out.family->coefficients[i][0]);
  }
}

TEST_CASE("finite differences confirm the partial blocks") {
  std::mt19937 rng(83);
  for (int trial = 0; trial < 15; ++trial) {
    int n = static_cast<int>(rng() % 2);
    int d = 1 + static_cast<int>(rng() % 2);
    Problem p = random_polynomial_problem(rng, n, d, d, 3, FieldMode::Real64);
    int i = static_cast<int>(rng() % 3);
    int j = static_cast<int>(rng() % (n + 1));
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<std::vector<double>> c(2 * i + n + 1, std::vector<double>(d));
    for (auto& row : c)
      for (auto& v : row) v = dist(rng);
    JetPoint<double> pt(n, d, c);
    CHECK(fd_check_partials(p, pt, i, j) <= 1e-6);
  }
}

TEST_CASE("finite differences are exact for linear problems") {
  Problem p = make_problem({"x*y(1) - 3*y(0)"}, 1, 1, FieldMode::Real64);
  JetPoint<double> pt(1, 1, {{0.5}, {-1.0}, {2.0}, {0.25}});
  CHECK(fd_check_partials(p, pt, 1, 1) <= 1e-9);
  Problem z = make_problem({"y(0) - y(0)"}, 0, 1, FieldMode::Real64);
  JetPoint<double> zpt(0, 1, {{1.0}});
  CHECK(fd_check_partials(z, zpt, 1, 0) == 0.0);
}
