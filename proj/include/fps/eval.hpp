#ifndef FPS_EVAL_HPP
#define FPS_EVAL_HPP

#include <vector>

#include "fps/expr.hpp"
#include "fps/jet.hpp"
#include "fps/sensitivity.hpp"

namespace fps {

// Uniform ring adapters so an Expr evaluates over plain scalars, jets, and
// sensitivity jets with one recursion.

template <class K>
K ring_constant(const K& /*proto*/, const Rational& q) {
  return field_traits<K>::from_rational(q);
}

template <class K>
Jet<K> ring_constant(const Jet<K>& proto, const Rational& q) {
  return Jet<K>::constant(proto.order(), field_traits<K>::from_rational(q));
}

template <class K>
SensitivityJet<K> ring_constant(const SensitivityJet<K>& proto, const Rational& q) {
  return SensitivityJet<K>(Jet<K>::constant(proto.order(), field_traits<K>::from_rational(q)),
                           proto.channels());
}

template <class K>
K ring_div(const K& a, const K& b) {
  if (b == field_traits<K>::zero()) throw singular_evaluation_error("division by zero");
  return a / b;
}

template <class K>
Jet<K> ring_div(const Jet<K>& a, const Jet<K>& b) {
  return jet_div(a, b);
}

template <class K>
SensitivityJet<K> ring_div(const SensitivityJet<K>& a, const SensitivityJet<K>& b) {
  return sens_div(a, b);
}

template <class K>
K ring_pow(const K& a, unsigned e) {
  K r = field_traits<K>::one();
  K base = a;
  while (e > 0) {
    if (e & 1u) r = r * base;
    e >>= 1u;
    if (e > 0) base = base * base;
  }
  return r;
}

template <class K>
Jet<K> ring_pow(const Jet<K>& a, unsigned e) {
  return jet_pow(a, e);
}

template <class K>
SensitivityJet<K> ring_pow(const SensitivityJet<K>& a, unsigned e) {
  return sens_pow(a, e);
}

inline double ring_call(AnalyticFn fn, double a) {
  switch (fn) {
    case AnalyticFn::Exp: return std::exp(a);
    case AnalyticFn::Log:
      if (a == 0.0) throw singular_evaluation_error("log(0)");
      return std::log(a);
    case AnalyticFn::Sin: return std::sin(a);
    case AnalyticFn::Cos: return std::cos(a);
  }
  throw usage_error("unknown analytic primitive");
}

inline std::complex<double> ring_call(AnalyticFn fn, const std::complex<double>& a) {
  switch (fn) {
    case AnalyticFn::Exp: return std::exp(a);
    case AnalyticFn::Log:
      if (a == std::complex<double>{}) throw singular_evaluation_error("log(0)");
      return std::log(a);
    case AnalyticFn::Sin: return std::sin(a);
    case AnalyticFn::Cos: return std::cos(a);
  }
  throw usage_error("unknown analytic primitive");
}

inline Rational ring_call(AnalyticFn fn, const Rational&) {
  throw unsupported_in_exact_mode_error(std::string(analytic_fn_name(fn)) +
                                        " is not available in rational mode");
}

template <class K>
Jet<K> ring_call(AnalyticFn fn, const Jet<K>& a) {
  return jet_analytic(fn, a);
}

template <class K>
SensitivityJet<K> ring_call(AnalyticFn fn, const SensitivityJet<K>& a) {
  return sens_analytic(fn, a);
}

// Assignment of x and every y(j)[i] to values of the evaluation ring.
template <class Ring>
struct EvalEnv {
  Ring x;
  std::vector<Ring> y;  // index: deriv * d + comp
  int d = 1;

  const Ring& y_at(int deriv, int comp) const {
    return y[static_cast<std::size_t>(deriv) * d + comp];
  }
};

template <class Ring>
Ring eval_expr(const Expr& e, const EvalEnv<Ring>& env) {
  switch (e.kind) {
    case ExprKind::Constant: return ring_constant(env.x, e.value);
    case ExprKind::VarX: return env.x;
    case ExprKind::VarY: return env.y_at(e.deriv, e.comp);
    case ExprKind::Neg: return -eval_expr(*e.lhs, env);
    case ExprKind::Add: return eval_expr(*e.lhs, env) + eval_expr(*e.rhs, env);
    case ExprKind::Sub: return eval_expr(*e.lhs, env) - eval_expr(*e.rhs, env);
    case ExprKind::Mul: return eval_expr(*e.lhs, env) * eval_expr(*e.rhs, env);
    case ExprKind::Div: return ring_div(eval_expr(*e.lhs, env), eval_expr(*e.rhs, env));
    case ExprKind::Pow: return ring_pow(eval_expr(*e.lhs, env), e.exponent);
    case ExprKind::Call: return ring_call(e.fn, eval_expr(*e.lhs, env));
  }
  throw usage_error("unknown expression node");
}

}  // namespace fps

#endif
