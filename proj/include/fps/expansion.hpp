#ifndef FPS_EXPANSION_HPP
#define FPS_EXPANSION_HPP

#include <vector>

#include "fps/eval.hpp"
#include "fps/expr.hpp"
#include "fps/matrix.hpp"
#include "fps/poly.hpp"

namespace fps {

// Coefficient family (c_0, ..., c_top) in K^d together with the induced
// restricted series point: x carries eps exactly, and the j-th derivative
// component reads coefficient c_{i+j} at series position i. Coefficients
// beyond the provided range are synthetic zeros.
template <class K>
struct JetPoint {
  int n = 0, d = 1;
  std::vector<std::vector<K>> coeffs;

  JetPoint() = default;
  JetPoint(int n_, int d_, std::vector<std::vector<K>> c)
      : n(n_), d(d_), coeffs(std::move(c)) {}

  int provided_count() const { return static_cast<int>(coeffs.size()); }
  bool provides(int index) const { return index < provided_count(); }

  std::vector<K> coeff(int index) const {
    if (index < provided_count()) return coeffs[index];
    return std::vector<K>(d, field_traits<K>::zero());
  }

  JetPoint truncated(int top_index) const {
    JetPoint p(n, d, {});
    for (int i = 0; i <= top_index && i < provided_count(); ++i) p.coeffs.push_back(coeffs[i]);
    return p;
  }

  JetPoint with_zeroed_range(int lo, int hi) const {
    JetPoint p(*this);
    for (int i = lo; i <= hi && i < p.provided_count(); ++i)
      p.coeffs[i].assign(d, field_traits<K>::zero());
    return p;
  }
};

template <class K>
K inverse_factorial(int t) {
  return field_traits<K>::from_rational(Rational(1) / factorial_rat(static_cast<unsigned long>(t)));
}

// Plain-coefficient jets of x and of every derivative slot, at the given
// truncation order: x = eps, and slot j position t carries c_{t+j} / t!.
template <class K>
EvalEnv<Jet<K>> restricted_jet_env(const JetPoint<K>& pt, int order) {
  EvalEnv<Jet<K>> env;
  env.d = pt.d;
  env.x = Jet<K>::variable(order, field_traits<K>::zero());
  env.y.reserve(static_cast<std::size_t>(pt.n + 1) * pt.d);
  for (int j = 0; j <= pt.n; ++j) {
    for (int comp = 0; comp < pt.d; ++comp) {
      Jet<K> jet(order);
      for (int t = 0; t <= order; ++t) jet[t] = pt.coeff(t + j)[comp] * inverse_factorial<K>(t);
      env.y.push_back(std::move(jet));
    }
  }
  return env;
}

// One sensitivity channel per seed; a seed marks the unrestricted coordinate
// of derivative slot `deriv`, series position `position`, component `comp`.
struct CoordinateSeed {
  int deriv;
  int position;
  int comp;
};

template <class K>
EvalEnv<SensitivityJet<K>> seeded_sensitivity_env(const JetPoint<K>& pt, int order,
                                                  const std::vector<CoordinateSeed>& seeds) {
  EvalEnv<Jet<K>> base = restricted_jet_env(pt, order);
  EvalEnv<SensitivityJet<K>> env;
  env.d = base.d;
  env.x = SensitivityJet<K>(base.x, seeds.size());
  env.y.reserve(base.y.size());
  for (int j = 0; j <= pt.n; ++j) {
    for (int comp = 0; comp < pt.d; ++comp) {
      SensitivityJet<K> value(base.y[static_cast<std::size_t>(j) * pt.d + comp], seeds.size());
      for (std::size_t ch = 0; ch < seeds.size(); ++ch) {
        const CoordinateSeed& s = seeds[ch];
        if (s.deriv == j && s.comp == comp && s.position <= order)
          value.dirs[ch][s.position] = inverse_factorial<K>(s.position);
      }
      env.y.push_back(std::move(value));
    }
  }
  return env;
}

// Expansion coefficients T^0..T^M of G along the restricted point; the i-th
// value is i! times the eps^i jet coefficient of G, so the 1/i! series
// convention lives here and nowhere else.
template <class K>
struct ExpansionCoefficients {
  std::vector<std::vector<K>> values;  // values[i] in K^r
  int order = 0;
  bool used_synthetic_zero = false;

  const std::vector<K>& at(int i) const { return values[i]; }

  double max_magnitude() const {
    double m = 0.0;
    for (const auto& v : values)
      for (const K& s : v) m = std::max(m, magnitude(s));
    return m;
  }
};

template <class K>
ExpansionCoefficients<K> expansion_coefficients(const Problem& problem, const JetPoint<K>& pt,
                                                int order) {
  ExpansionCoefficients<K> out;
  out.order = order;
  out.used_synthetic_zero = pt.provided_count() < order + pt.n + 1;
  EvalEnv<Jet<K>> env = restricted_jet_env(pt, order);
  out.values.assign(order + 1, std::vector<K>(problem.num_eqs_r, field_traits<K>::zero()));
  for (int q = 0; q < problem.num_eqs_r; ++q) {
    Jet<K> g = eval_expr(*problem.equations[q], env);
    for (int i = 0; i <= order; ++i)
      out.values[i][q] = field_traits<K>::from_rational(factorial_rat(i)) * g[i];
  }
  return out;
}

// The r-by-d block of partial derivatives of T^{2i} with respect to the
// unrestricted coordinate block of derivative slot j at series position i,
// evaluated at the restricted point. Slots outside [0, n] give zero.
template <class K>
Matrix<K> partial_block(const Problem& problem, const JetPoint<K>& pt, int i, int j) {
  Matrix<K> out(problem.num_eqs_r, pt.d);
  if (j < 0 || j > pt.n) return out;
  const int order = 2 * i;
  std::vector<CoordinateSeed> seeds;
  seeds.reserve(pt.d);
  for (int comp = 0; comp < pt.d; ++comp) seeds.push_back({j, i, comp});
  EvalEnv<SensitivityJet<K>> env = seeded_sensitivity_env(pt, order, seeds);
  const K fact = field_traits<K>::from_rational(factorial_rat(order));
  for (int q = 0; q < problem.num_eqs_r; ++q) {
    SensitivityJet<K> g = eval_expr(*problem.equations[q], env);
    for (int comp = 0; comp < pt.d; ++comp) out(q, comp) = fact * g.dirs[comp][order];
  }
  return out;
}

// Row of binomial weights gamma_i = C(2k+1+l, i) / C(2i, i), i = 0..k.
inline std::vector<Rational> gamma_row(int k, int l) {
  std::vector<Rational> row;
  row.reserve(k + 1);
  for (int i = 0; i <= k; ++i) {
    Rational num(binomial(static_cast<unsigned long>(2 * k + 1 + l), static_cast<unsigned long>(i)));
    Rational den(binomial(static_cast<unsigned long>(2 * i), static_cast<unsigned long>(i)));
    row.push_back(num / den);
  }
  return row;
}

// The same weight as a polynomial in the shift l:
// C(2k+1+l, i) / C(2i, i) = prod_{t=0..i-1} (l + 2k+1-t) / (i! * C(2i, i)).
inline Poly<Rational> gamma_weight_poly(int k, int i) {
  Poly<Rational> p = Poly<Rational>::constant(Rational(1));
  for (int t = 0; t < i; ++t)
    p = p * Poly<Rational>(std::vector<Rational>{Rational(2 * k + 1 - t), Rational(1)});
  Rational den = factorial_rat(static_cast<unsigned long>(i)) *
                 Rational(binomial(static_cast<unsigned long>(2 * i), static_cast<unsigned long>(i)));
  return (Rational(1) / den) * p;
}

template <class K>
Poly<K> poly_to_field(const Poly<Rational>& p) {
  std::vector<K> c;
  c.reserve(p.coeffs().size());
  for (const Rational& q : p.coeffs()) c.push_back(field_traits<K>::from_rational(q));
  return Poly<K>(std::move(c));
}

// Remainder vector: T^{2k+1+l} with the linearly-entering high coefficient
// block c_{k+1+l+n} .. c_{2k+1+l+n} zeroed out, which removes the separant
// part of the decomposition exactly.
template <class K>
std::vector<K> remainder_vector(const Problem& problem, const JetPoint<K>& pt, int k, int l) {
  const int n = pt.n;
  const int target = 2 * k + 1 + l;
  JetPoint<K> zeroed = pt.with_zeroed_range(k + 1 + l + n, 2 * k + 1 + l + n);
  ExpansionCoefficients<K> t = expansion_coefficients(problem, zeroed, target);
  return t.values[target];
}

}  // namespace fps

#endif
