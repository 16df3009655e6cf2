#ifndef FPS_TEST_UTIL_HPP
#define FPS_TEST_UTIL_HPP

#include <random>
#include <string>
#include <vector>

#include "fps/expansion.hpp"
#include "fps/expr.hpp"

namespace fps::testutil {

inline Problem make_problem(const std::vector<std::string>& eqs, int n, int d,
                            FieldMode mode = FieldMode::RationalExact) {
  Problem p;
  p.deriv_order_n = n;
  p.dim_d = d;
  p.num_eqs_r = static_cast<int>(eqs.size());
  p.field = mode;
  for (const auto& src : eqs) p.equations.push_back(parse_expression(src));
  validate_problem(p);
  return p;
}

inline JetPoint<Rational> make_point(int n, int d, const std::vector<std::vector<long>>& coeffs) {
  std::vector<std::vector<Rational>> c;
  for (const auto& row : coeffs) {
    std::vector<Rational> v;
    for (long x : row) v.emplace_back(x);
    c.push_back(std::move(v));
  }
  return JetPoint<Rational>(n, d, std::move(c));
}

template <class K>
JetPoint<K> random_point(std::mt19937& rng, int n, int d, int count, long lo = -2, long hi = 2) {
  std::uniform_int_distribution<long> dist(lo, hi);
  std::vector<std::vector<K>> c(count, std::vector<K>(d));
  for (auto& row : c)
    for (auto& v : row) v = field_traits<K>::from_int(dist(rng));
  return JetPoint<K>(n, d, std::move(c));
}

// Random polynomial component: a short sum of monomials c * x^a * prod y(j)[i]^e
// with bounded total degree.
inline ExprPtr random_polynomial_component(std::mt19937& rng, int n, int d, int max_degree) {
  std::uniform_int_distribution<long> coeff(-3, 3);
  std::uniform_int_distribution<int> nterms(1, 4);
  ExprPtr sum;
  int terms = nterms(rng);
  for (int t = 0; t < terms; ++t) {
    long c = coeff(rng);
    if (c == 0) c = 1;
    ExprPtr mono = make_constant(Rational(c));
    int degree_left = 1 + static_cast<int>(rng() % max_degree);
    while (degree_left > 0) {
      int pick = static_cast<int>(rng() % ((n + 1) * d + 1));
      ExprPtr factor;
      if (pick == 0) {
        factor = make_var_x();
      } else {
        int j = (pick - 1) / d;
        int comp = (pick - 1) % d;
        factor = make_var_y(j, comp);
      }
      mono = make_binary(ExprKind::Mul, mono, factor);
      --degree_left;
      if (rng() % 3 == 0) break;
    }
    sum = sum ? make_binary(ExprKind::Add, sum, mono) : mono;
  }
  return sum;
}

inline Problem random_polynomial_problem(std::mt19937& rng, int n, int d, int r, int max_degree,
                                         FieldMode mode = FieldMode::RationalExact) {
  Problem p;
  p.deriv_order_n = n;
  p.dim_d = d;
  p.num_eqs_r = r;
  p.field = mode;
  for (int q = 0; q < r; ++q)
    p.equations.push_back(random_polynomial_component(rng, n, d, max_degree));
  validate_problem(p);
  return p;
}

}  // namespace fps::testutil

#endif
