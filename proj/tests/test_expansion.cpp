#include <doctest.h>

#include <random>

#include "fps/expansion.hpp"
#include "test_util.hpp"

using namespace fps;
using namespace fps::testutil;

TEST_CASE("expansion coefficients of the parabola solution vanish identically") {
  Problem p = make_problem({"y(1)^2 - 4*y(0)"}, 1, 1);
  auto pt = make_point(1, 1, {{0}, {0}, {2}});
  auto t = expansion_coefficients(p, pt, 8);
  for (int i = 0; i <= 8; ++i) CHECK(t.values[i][0] == Rational(0));
  CHECK(t.used_synthetic_zero);
}

TEST_CASE("Euler-type equation has expansion coefficients (i - 3) c_i") {
  Problem p = make_problem({"x*y(1) - 3*y(0)"}, 1, 1);
  std::mt19937 rng(51);
  auto pt = random_point<Rational>(rng, 1, 1, 9, -5, 5);
  auto t = expansion_coefficients(p, pt, 8);
  for (int i = 0; i <= 8; ++i)
    CHECK(t.values[i][0] == Rational(i - 3) * pt.coeffs[i][0]);
}

TEST_CASE("a root base point gives vanishing constant coefficient") {
  Problem p = make_problem({"y(1)^2 - 4*y(0)"}, 1, 1);
  auto pt = make_point(1, 1, {{1}, {2}});  // G[z0] = 4 - 4 = 0
  auto t = expansion_coefficients(p, pt, 0);
  CHECK(t.values[0][0] == Rational(0));
}

TEST_CASE("partial blocks match the hand-derived Euler values") {
  Problem p = make_problem({"x*y(1) - 3*y(0)"}, 1, 1);
  auto pt = make_point(1, 1, {{0}, {0}, {0}});
  CHECK(partial_block(p, pt, 0, 1)(0, 0) == Rational(0));   // x_0 = 0
  CHECK(partial_block(p, pt, 1, 1)(0, 0) == Rational(2));   // 2 x_1 = 2
  CHECK(partial_block(p, pt, 0, 0)(0, 0) == Rational(-3));
}

TEST_CASE("partial blocks of the parabola use the unrestricted coordinates") {
  Problem p = make_problem({"y(1)^2 - 4*y(0)"}, 1, 1);
  auto pt = make_point(1, 1, {{0}, {0}, {2}});
  // d T^2 / d y_{1,1} = 4 y_{1,1} evaluated at y_{1,1} = c_2 = 2.
  CHECK(partial_block(p, pt, 1, 1)(0, 0) == Rational(8));
  CHECK(partial_block(p, pt, 0, 0)(0, 0) == Rational(-4));
}

TEST_CASE("negative derivative slots give the zero block") {
  Problem p = make_problem({"x*y(1) - 3*y(0)"}, 1, 1);
  auto pt = make_point(1, 1, {{0}, {0}});
  auto z = partial_block(p, pt, 2, -1);
  CHECK(z(0, 0) == Rational(0));
}

TEST_CASE("gamma rows evaluate the closed binomial form") {
  auto r00 = gamma_row(0, 0);
  REQUIRE(r00.size() == 1);
  CHECK(r00[0] == Rational(1));

  auto r10 = gamma_row(1, 0);
  REQUIRE(r10.size() == 2);
  CHECK(r10[0] == Rational(1));
  CHECK(r10[1] == Rational(3, 2));

  auto r11 = gamma_row(1, 1);
  CHECK(r11[1] == Rational(2));

  // first entry is always 1, all entries positive
  std::mt19937 rng(52);
  for (int trial = 0; trial < 20; ++trial) {
    int k = static_cast<int>(rng() % 5);
    int l = static_cast<int>(rng() % 5);
    auto row = gamma_row(k, l);
    CHECK(row[0] == Rational(1));
    for (const auto& g : row) CHECK(g > 0);
  }
}

TEST_CASE("gamma weight polynomials interpolate the gamma rows") {
  for (int k = 0; k <= 3; ++k)
    for (int i = 0; i <= k; ++i) {
      Poly<Rational> w = gamma_weight_poly(k, i);
      CHECK(w.degree() == i);
      for (long l = 0; l <= 4; ++l) CHECK(w.eval(Rational(l)) == gamma_row(k, static_cast<int>(l))[i]);
    }
}

TEST_CASE("remainder vectors vanish on the shipped desk examples") {
  Problem euler = make_problem({"x*y(1) - 3*y(0)"}, 1, 1);
  auto e_pt = make_point(1, 1, {{0}, {0}, {0}});
  CHECK(remainder_vector(euler, e_pt, 1, 0)[0] == Rational(0));

  Problem parab = make_problem({"y(1)^2 - 4*y(0)"}, 1, 1);
  auto p_pt = make_point(1, 1, {{0}, {0}, {2}});
  CHECK(remainder_vector(parab, p_pt, 1, 0)[0] == Rational(0));

  Problem linear = make_problem({"x*y(1) - 3*y(0) + y(1)"}, 1, 1);
  auto zero_pt = make_point(1, 1, {{0}, {0}, {0}});
  for (int k = 0; k <= 2; ++k)
    for (int l = 0; l <= 2; ++l) CHECK(remainder_vector(linear, zero_pt, k, l)[0] == Rational(0));
}

TEST_CASE("remainder vectors ignore coefficients above the stated range") {
  std::mt19937 rng(53);
  for (int trial = 0; trial < 15; ++trial) {
    int n = static_cast<int>(rng() % 2);
    int d = 1 + static_cast<int>(rng() % 2);
    Problem p = random_polynomial_problem(rng, n, d, d, 3);
    int k = static_cast<int>(rng() % 3);
    int l = static_cast<int>(rng() % 3);
    auto pt = random_point<Rational>(rng, n, d, 2 * k + 2 + l + n);
    auto base = remainder_vector(p, pt, k, l);
    auto perturbed_pt = pt;
    std::uniform_int_distribution<long> dist(-4, 4);
    for (int idx = k + l + n + 1; idx < perturbed_pt.provided_count(); ++idx)
      for (int c = 0; c < d; ++c) perturbed_pt.coeffs[idx][c] = Rational(dist(rng));
    auto perturbed = remainder_vector(p, perturbed_pt, k, l);
    for (int q = 0; q < d; ++q) CHECK(base[q] == perturbed[q]);
  }
}

TEST_CASE("affine decomposition: T = Gamma S high + remainder, exactly") {
  std::mt19937 rng(54);
  for (int trial = 0; trial < 40; ++trial) {
    int n = static_cast<int>(rng() % 3);
    int d = 1 + static_cast<int>(rng() % 3);
    int r = d;
    Problem p = random_polynomial_problem(rng, n, d, r, 3);
    int k = static_cast<int>(rng() % 4);
    int l = static_cast<int>(rng() % 4);
    const int target = 2 * k + 1 + l;
    auto pt = random_point<Rational>(rng, n, d, target + n + 1);

    auto t = expansion_coefficients(p, pt, target);
    auto rbar = remainder_vector(p, pt, k, l);
    auto gamma = gamma_row(k, l);

    // Gamma (x) S times the high coefficient block, assembled from partials.
    std::vector<Rational> linear(r, Rational(0));
    for (int pcol = 0; pcol <= k; ++pcol) {
      // column pcol multiplies c_{2k+1+l+n-pcol}
      const auto& chigh = pt.coeffs[target + n - pcol];
      for (int i = 0; i <= k; ++i) {
        if (pcol < i) continue;
        Matrix<Rational> block = partial_block(p, pt, i, n - (pcol - i));
        for (int row = 0; row < r; ++row) {
          Rational acc(0);
          for (int c = 0; c < d; ++c) acc += block(row, c) * chigh[c];
          linear[row] += gamma[i] * acc;
        }
      }
    }
    for (int row = 0; row < r; ++row)
      CHECK(t.values[target][row] == linear[row] + rbar[row]);
  }
}

TEST_CASE("scalar and system shaped partials agree for d = r = 1") {
  std::mt19937 rng(55);
  for (int trial = 0; trial < 10; ++trial) {
    Problem p = random_polynomial_problem(rng, 1, 1, 1, 3);
    auto pt = random_point<Rational>(rng, 1, 1, 6);
    for (int i = 0; i <= 2; ++i)
      for (int j = 0; j <= 1; ++j) {
        Matrix<Rational> block = partial_block(p, pt, i, j);
        CHECK(block.rows() == 1);
        CHECK(block.cols() == 1);
      }
  }
}
