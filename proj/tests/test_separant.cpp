#include <doctest.h>

#include <random>

#include "fps/separant.hpp"
#include "test_util.hpp"

using namespace fps;
using namespace fps::testutil;

TEST_CASE("Euler-type separant matrices match the hand values") {
  Problem p = make_problem({"x*y(1) - 3*y(0)"}, 1, 1);
  auto pt = make_point(1, 1, {{0}, {0}, {0}});
  auto s1 = assemble_separant(p, pt, 1);
  CHECK(s1.full(0, 0) == Rational(0));
  CHECK(s1.full(0, 1) == Rational(-3));
  CHECK(s1.full(1, 0) == Rational(0));
  CHECK(s1.full(1, 1) == Rational(2));
}

TEST_CASE("parabola separant at level zero is the classical separant") {
  Problem p = make_problem({"y(1)^2 - 4*y(0)"}, 1, 1);
  auto pt = make_point(1, 1, {{0}, {0}});
  auto s0 = assemble_separant(p, pt, 0);
  CHECK(s0.full(0, 0) == Rational(0));  // 2 c_1 = 0

  auto pt2 = make_point(1, 1, {{0}, {5}});
  auto s0b = assemble_separant(p, pt2, 0);
  CHECK(s0b.full(0, 0) == Rational(10));  // dG/dy' at z0
}

TEST_CASE("bordering: the leading block of S_k is S_{k-1}") {
  std::mt19937 rng(61);
  for (int trial = 0; trial < 15; ++trial) {
    int n = static_cast<int>(rng() % 3);
    int d = 1 + static_cast<int>(rng() % 2);
    Problem p = random_polynomial_problem(rng, n, d, d, 3);
    int k = 1 + static_cast<int>(rng() % 3);
    auto pt = random_point<Rational>(rng, n, d, k + n + 1);
    auto sk = assemble_separant(p, pt, k);
    auto sk1 = assemble_separant(p, pt, k - 1);
    for (int i = 0; i < sk1.full.rows(); ++i)
      for (int j = 0; j < sk1.full.cols(); ++j) CHECK(sk.full(i, j) == sk1.full(i, j));
  }
}

TEST_CASE("band structure: blocks outside the derivative range vanish") {
  std::mt19937 rng(62);
  for (int trial = 0; trial < 10; ++trial) {
    int n = static_cast<int>(rng() % 2);
    Problem p = random_polynomial_problem(rng, n, 1, 1, 3);
    int k = n + 2 + static_cast<int>(rng() % 2);
    auto pt = random_point<Rational>(rng, n, 1, k + n + 1);
    auto s = assemble_separant(p, pt, k);
    for (int i = 0; i <= k; ++i)
      for (int pcol = 0; pcol <= k; ++pcol) {
        bool in_band = pcol >= i && pcol - i <= n;
        if (!in_band) CHECK(s.block(i, pcol)(0, 0) == Rational(0));
      }
  }
}

TEST_CASE("algebraic case n = 0 gives block-diagonal separant matrices") {
  std::mt19937 rng(63);
  for (int trial = 0; trial < 10; ++trial) {
    int d = 1 + static_cast<int>(rng() % 2);
    Problem p = random_polynomial_problem(rng, 0, d, d, 3);
    auto pt = random_point<Rational>(rng, 0, d, 4);
    auto s = assemble_separant(p, pt, 3);
    for (int i = 0; i <= 3; ++i)
      for (int pcol = 0; pcol <= 3; ++pcol) {
        if (pcol == i) continue;
        for (int br = 0; br < d; ++br)
          for (int bc = 0; bc < d; ++bc) CHECK(s.block(i, pcol)(br, bc) == Rational(0));
      }
  }
}

TEST_CASE("check_conditions passes on the Euler instance at m = 1") {
  Problem p = make_problem({"x*y(1) - 3*y(0)"}, 1, 1);
  auto pt = make_point(1, 1, {{0}, {0}, {0}});
  auto rep = check_conditions(p, pt, 1);
  CHECK(rep.base_point_is_root);
  CHECK(rep.prev_separant_zero);
  CHECK(rep.separant_nonzero);
  CHECK(rep.remainders_zero);
  CHECK(rep.all_ok());
}

TEST_CASE("check_conditions passes on the parabola instance") {
  Problem p = make_problem({"y(1)^2 - 4*y(0)"}, 1, 1);
  auto pt = make_point(1, 1, {{0}, {0}, {2}});
  auto rep = check_conditions(p, pt, 1);
  CHECK(rep.all_ok());
  CHECK(rep.s_cur.block(1, 1)(0, 0) == Rational(8));
}

TEST_CASE("check_conditions fails with a witness on a nondegenerate ODE") {
  Problem p = make_problem({"y(1) - y(0)"}, 1, 1);
  auto pt = make_point(1, 1, {{1}, {1}, {1}});
  auto rep = check_conditions(p, pt, 1);
  CHECK(rep.base_point_is_root);
  CHECK(!rep.prev_separant_zero);
  CHECK(!rep.all_ok());
  REQUIRE(!rep.witnesses.empty());
  CHECK(rep.witnesses.front().magnitude == doctest::Approx(1.0));
}

TEST_CASE("check_conditions reports a non-root base point without throwing") {
  Problem p = make_problem({"y(1) - y(0) - 1"}, 1, 1);
  auto pt = make_point(1, 1, {{0}, {0}, {0}});
  auto rep = check_conditions(p, pt, 1);
  CHECK(!rep.base_point_is_root);
  CHECK(!rep.all_ok());
}

TEST_CASE("remainder shortcut equals the zeroing extraction when (i) holds") {
  // Under a vanishing lower separant matrix, T^j at the truncated point equals
  // the j-th remainder for j <= 2m.
  Problem p = make_problem({"x*y(1) - 3*y(0)"}, 1, 1);
  std::mt19937 rng(64);
  std::uniform_int_distribution<long> dist(-3, 3);
  for (int trial = 0; trial < 10; ++trial) {
    auto pt = make_point(1, 1, {{0}, {dist(rng)}, {dist(rng)}});
    int m = 1;
    auto rep = check_conditions(p, pt, m);
    CHECK(rep.prev_separant_zero);
    for (int j = 1; j <= 2 * m; ++j) {
      int k = (j - 1) / 2;
      int l = (j - 1) % 2;
      auto rbar = remainder_vector(p, pt.truncated(m + 1), k, l);
      CHECK(rep.low_order_values[j - 1][0] == rbar[0]);
    }
  }
}
