#include <doctest.h>

#include <random>

#include "fps/jet.hpp"
#include "fps/sensitivity.hpp"

using namespace fps;

namespace {

Jet<Rational> rational_jet(std::initializer_list<long> coeffs) {
  Jet<Rational> j(static_cast<int>(coeffs.size()) - 1);
  int i = 0;
  for (long c : coeffs) j[i++] = Rational(c);
  return j;
}

template <class K>
Jet<K> random_jet(std::mt19937& rng, int order) {
  std::uniform_int_distribution<long> dist(-4, 4);
  Jet<K> j(order);
  for (int i = 0; i <= order; ++i) j[i] = field_traits<K>::from_int(dist(rng));
  return j;
}

}  // namespace

TEST_CASE("jet multiplication matches truncated polynomial products") {
  auto a = rational_jet({1, 1, 0});
  auto b = rational_jet({1, -1, 0});
  auto p = a * b;
  CHECK(p[0] == Rational(1));
  CHECK(p[1] == Rational(0));
  CHECK(p[2] == Rational(-1));

  auto zero = Jet<Rational>(2);
  auto q = zero * a;
  for (int i = 0; i <= 2; ++i) CHECK(q[i] == Rational(0));

  auto c = rational_jet({1, 1, 1});
  auto d = rational_jet({1, 1, 0});
  auto r = c * d;
  CHECK(r[0] == Rational(1));
  CHECK(r[1] == Rational(2));
  CHECK(r[2] == Rational(2));
}

TEST_CASE("jet multiplication rejects order mismatch") {
  Jet<Rational> a(2), b(3);
  CHECK_THROWS_AS(a * b, usage_error);
}

TEST_CASE("analytic primitives reproduce the classical series") {
  Jet<double> eps = Jet<double>::variable(3, 0.0);
  auto e = jet_analytic(AnalyticFn::Exp, eps);
  CHECK(e[0] == doctest::Approx(1.0));
  CHECK(e[1] == doctest::Approx(1.0));
  CHECK(e[2] == doctest::Approx(0.5));
  CHECK(e[3] == doctest::Approx(1.0 / 6.0));

  Jet<double> den = Jet<double>::constant(2, 1.0);
  den[1] = -1.0;
  auto geo = jet_div(Jet<double>::constant(2, 1.0), den);
  CHECK(geo[0] == doctest::Approx(1.0));
  CHECK(geo[1] == doctest::Approx(1.0));
  CHECK(geo[2] == doctest::Approx(1.0));

  Jet<double> onep = Jet<double>::variable(3, 1.0);
  auto lg = jet_analytic(AnalyticFn::Log, onep);
  CHECK(lg[0] == doctest::Approx(0.0));
  CHECK(lg[1] == doctest::Approx(1.0));
  CHECK(lg[2] == doctest::Approx(-0.5));
  CHECK(lg[3] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("analytic primitives are rejected over exact rationals") {
  Jet<Rational> a = Jet<Rational>::variable(3, Rational(0));
  CHECK_THROWS_AS(jet_analytic(AnalyticFn::Exp, a), unsupported_in_exact_mode_error);
}

TEST_CASE("division by a series with zero constant term is singular") {
  Jet<double> num = Jet<double>::constant(2, 1.0);
  Jet<double> den = Jet<double>::variable(2, 0.0);
  CHECK_THROWS_AS(jet_div(num, den), singular_evaluation_error);
}

TEST_CASE("ring laws hold exactly over rationals") {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    int order = 1 + static_cast<int>(rng() % 16);
    auto a = random_jet<Rational>(rng, order);
    auto b = random_jet<Rational>(rng, order);
    auto c = random_jet<Rational>(rng, order);
    auto assoc_l = (a * b) * c;
    auto assoc_r = a * (b * c);
    auto dist_l = a * (b + c);
    auto dist_r = a * b + a * c;
    auto comm_l = a * b;
    auto comm_r = b * a;
    for (int i = 0; i <= order; ++i) {
      CHECK(assoc_l[i] == assoc_r[i]);
      CHECK(dist_l[i] == dist_r[i]);
      CHECK(comm_l[i] == comm_r[i]);
    }
  }
}

TEST_CASE("ring laws hold to 1e-12 relative in float mode") {
  std::mt19937 rng(43);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    int order = 1 + static_cast<int>(rng() % 16);
    Jet<double> a(order), b(order), c(order);
    for (int i = 0; i <= order; ++i) {
      a[i] = dist(rng);
      b[i] = dist(rng);
      c[i] = dist(rng);
    }
    auto l = (a * b) * c;
    auto r = a * (b * c);
    for (int i = 0; i <= order; ++i) {
      double scale = std::max(1.0, std::abs(l[i]));
      CHECK(std::abs(l[i] - r[i]) / scale <= 1e-12);
    }
  }
}

TEST_CASE("truncation commutes with arithmetic") {
  std::mt19937 rng(44);
  for (int trial = 0; trial < 30; ++trial) {
    int order = 4 + static_cast<int>(rng() % 10);
    int lower = 1 + static_cast<int>(rng() % (order - 1));
    auto a = random_jet<Rational>(rng, order);
    auto b = random_jet<Rational>(rng, order);
    auto full = (a * b).truncated(lower);
    auto low = a.truncated(lower) * b.truncated(lower);
    for (int i = 0; i <= lower; ++i) CHECK(full[i] == low[i]);
  }
}

TEST_CASE("sensitivity channels follow the product rule") {
  Jet<Rational> a = rational_jet({1, 1});
  Jet<Rational> b = rational_jet({1, -1});
  SensitivityJet<Rational> sa(a, 1), sb(b, 1);
  sa.dirs[0][0] = Rational(1);  // da = 1
  auto prod = sa * sb;
  CHECK(prod.dirs[0][0] == Rational(1));
  CHECK(prod.dirs[0][1] == Rational(-1));  // d(ab) = b when db = 0
}

TEST_CASE("sensitivity of exp is exp times the direction") {
  Jet<double> a = Jet<double>::variable(2, 0.0);
  SensitivityJet<double> sa(a, 1);
  sa.dirs[0][0] = 1.0;
  auto e = sens_analytic(AnalyticFn::Exp, sa);
  CHECK(e.dirs[0][0] == doctest::Approx(1.0));
  CHECK(e.dirs[0][1] == doctest::Approx(1.0));
  CHECK(e.dirs[0][2] == doctest::Approx(0.5));
}

TEST_CASE("zero direction stays zero through every primitive") {
  Jet<double> a = Jet<double>::variable(3, 0.5);
  SensitivityJet<double> sa(a, 1);  // channel starts at zero
  auto out = sens_analytic(AnalyticFn::Sin, sens_pow(sa * sa, 3));
  for (int i = 0; i <= 3; ++i) CHECK(out.dirs[0][i] == 0.0);
}

TEST_CASE("sensitivity matches central finite differences on polynomials") {
  std::mt19937 rng(45);
  std::uniform_real_distribution<double> dist(-1.5, 1.5);
  const double h = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    int order = 3 + static_cast<int>(rng() % 4);
    Jet<double> a(order), b(order);
    for (int i = 0; i <= order; ++i) {
      a[i] = dist(rng);
      b[i] = dist(rng);
    }
    int slot = static_cast<int>(rng() % (order + 1));
    auto f = [&](double bump) {
      Jet<double> ap = a;
      ap[slot] += bump;
      return ap * ap * b + jet_pow(ap, 3);
    };
    SensitivityJet<double> sa(a, 1), sb(b, 1);
    sa.dirs[0][slot] = 1.0;
    auto exact = sa * sa * sb + sens_pow(sa, 3);
    auto up = f(h), down = f(-h);
    for (int i = 0; i <= order; ++i) {
      double fd = (up[i] - down[i]) / (2 * h);
      double scale = std::max(1.0, std::abs(exact.dirs[0][i]));
      CHECK(std::abs(fd - exact.dirs[0][i]) / scale <= 1e-6);
    }
  }
}

TEST_CASE("sensitivity matches formal derivatives exactly over rationals") {
  std::mt19937 rng(46);
  for (int trial = 0; trial < 20; ++trial) {
    int order = 3 + static_cast<int>(rng() % 4);
    auto a = random_jet<Rational>(rng, order);
    int slot = static_cast<int>(rng() % (order + 1));
    // p(a) = a^3: dp = 3 a^2 da with da = eps^slot
    SensitivityJet<Rational> sa(a, 1);
    sa.dirs[0][slot] = Rational(1);
    auto cubed = sens_pow(sa, 3);
    Jet<Rational> formal = Rational(3) * (a * a);
    // multiply by eps^slot: shift coefficients
    Jet<Rational> expect(order);
    for (int i = slot; i <= order; ++i) expect[i] = formal[i - slot];
    for (int i = 0; i <= order; ++i) CHECK(cubed.dirs[0][i] == expect[i]);
  }
}
