#ifndef FPS_TOUGERON_HPP
#define FPS_TOUGERON_HPP

#include <optional>
#include <vector>

#include "fps/separant.hpp"

namespace fps {

// Algebraic case n = 0: the degenerate implicit-function continuation. The
// truncated polynomial base curve ybar(x) = sum_{i<=m} c_i x^i / i! admits a
// smooth correction c_{m+1}(x) with an explicit value at x = 0; away from 0
// the correction is computed by Newton on the scaled residual, with the
// x^{2m+1} factor removed analytically through the jet expansion rather than
// by dividing float near-zeros.

template <class K>
struct TougeronHypotheses {
  bool base_point_is_root = false;
  bool lower_blocks_zero = false;   // T^{2i} blocks for i < m vanish
  bool lead_block_invertible = false;
  bool remainders_zero = false;
  Matrix<K> lead_block;

  bool all_ok() const {
    return base_point_is_root && lower_blocks_zero && lead_block_invertible && remainders_zero;
  }
};

template <class K>
TougeronHypotheses<K> tougeron_hypotheses(const Problem& problem, const JetPoint<K>& pt, int m) {
  if (pt.n != 0) throw usage_error("the continuation applies to the algebraic case n = 0 only");
  if (!problem.square()) throw usage_error("the continuation requires r = d");
  if (m < 1) throw usage_error("the continuation requires m >= 1");
  TougeronHypotheses<K> hyp;
  ConditionReport<K> rep = check_conditions(problem, pt, m);
  hyp.base_point_is_root = rep.base_point_is_root;
  hyp.lower_blocks_zero = rep.prev_separant_zero;  // n = 0: S_{m-1} is the diagonal of lower blocks
  hyp.remainders_zero = rep.remainders_zero;
  hyp.lead_block = partial_block(problem, pt, m, 0);
  K det = determinant(hyp.lead_block, problem.tol);
  hyp.lead_block_invertible =
      !is_zero(det, problem.tol, std::max(1.0, hyp.lead_block.max_magnitude()));
  return hyp;
}

// Closed-form continuation value at x = 0:
//   c_{m+1}(0) = -(1/gamma_m) * inv(T^{2m} block) * remainder_{2m+1}.
template <class K>
std::vector<K> continuation_limit(const Problem& problem, const JetPoint<K>& pt, int m) {
  TougeronHypotheses<K> hyp = tougeron_hypotheses(problem, pt, m);
  if (!hyp.all_ok()) throw hypothesis_error("continuation hypotheses fail at level m");
  std::vector<K> rbar = remainder_vector(problem, pt, m, 0);
  LinearSolve<K> sol = solve_linear(hyp.lead_block, rbar, problem.tol);
  if (!sol.feasible || sol.rank < pt.d)
    throw hypothesis_error("leading block unexpectedly singular");
  K inv_gamma = field_traits<K>::from_rational(Rational(1) / gamma_row(m, 0)[m]);
  std::vector<K> out(pt.d);
  for (int c = 0; c < pt.d; ++c) out[c] = -(inv_gamma * sol.particular[c]);
  return out;
}

struct ContinuationSample {
  double x = 0.0;
  std::vector<double> value;       // c_{m+1}(x)
  double scaled_residual = 0.0;    // |phi(x, c)| at the Newton fixed point
  double unscaled_residual = 0.0;  // |G[x, yhat(x)]| evaluated directly
  int newton_iterations = 0;
  bool converged = false;
  bool outside_radius = false;     // expansion tail fails to decay at this x
};

struct ContinuationOptions {
  int extra_orders = 8;    // expansion length past x^{2m+1}
  int max_iterations = 50;
  double tolerance = 1e-12;
};

struct ContinuationResult {
  std::vector<double> limit_value;
  std::vector<ContinuationSample> samples;
};

namespace tougeron_detail {

// psi coefficients: plain jet coefficients of G[eps, ybar(eps) + c eps^{m+1}/(m+1)!].
inline std::vector<Jet<double>> scaled_residual_jets(const Problem& problem,
                                                     const JetPoint<double>& pt, int m,
                                                     const std::vector<double>& c, int order) {
  EvalEnv<Jet<double>> env;
  env.d = pt.d;
  env.x = Jet<double>::variable(order, 0.0);
  for (int comp = 0; comp < pt.d; ++comp) {
    Jet<double> y(order);
    for (int i = 0; i <= m && i <= order; ++i)
      y[i] = pt.coeff(i)[comp] * inverse_factorial<double>(i);
    if (m + 1 <= order) y[m + 1] += c[comp] * inverse_factorial<double>(m + 1);
    env.y.push_back(std::move(y));
  }
  std::vector<Jet<double>> out;
  for (int q = 0; q < problem.num_eqs_r; ++q)
    out.push_back(eval_expr(*problem.equations[q], env));
  return out;
}

struct PhiValue {
  std::vector<double> phi;
  Matrix<double> jacobian;
  bool outside_radius = false;
};

inline PhiValue phi_at(const Problem& problem, const JetPoint<double>& pt, int m, double x,
                       const std::vector<double>& c, int extra_orders) {
  const int d = pt.d;
  const int order = 2 * m + 1 + extra_orders;
  EvalEnv<SensitivityJet<double>> env;
  env.d = d;
  env.x = SensitivityJet<double>(Jet<double>::variable(order, 0.0), d);
  for (int comp = 0; comp < d; ++comp) {
    Jet<double> y(order);
    for (int i = 0; i <= m && i <= order; ++i)
      y[i] = pt.coeff(i)[comp] * inverse_factorial<double>(i);
    y[m + 1] += c[comp] * inverse_factorial<double>(m + 1);
    SensitivityJet<double> sy(y, d);
    sy.dirs[comp][m + 1] = inverse_factorial<double>(m + 1);
    env.y.push_back(std::move(sy));
  }
  const double fact = factorial_rat(static_cast<unsigned long>(2 * m + 1)).get_d();
  PhiValue out;
  out.phi.assign(d, 0.0);
  out.jacobian = Matrix<double>(d, d);
  for (int q = 0; q < d; ++q) {
    SensitivityJet<double> g = eval_expr(*problem.equations[q], env);
    // Horner over the tail starting at eps^{2m+1}; the factor is split off
    // index-wise, never by dividing by x^{2m+1}.
    double acc = 0.0;
    double first_mag = 0.0, last_mag = 0.0;
    for (int i = order; i >= 2 * m + 1; --i) {
      acc = acc * x + g.base[i];
      double term = std::abs(g.base[i]) * std::pow(std::abs(x), i - (2 * m + 1));
      if (i == order) last_mag = term;
      if (i == 2 * m + 1) first_mag = std::max(term, 1e-300);
    }
    if (last_mag > first_mag && last_mag > 1e-12) out.outside_radius = true;
    out.phi[q] = fact * acc;
    for (int comp = 0; comp < d; ++comp) {
      double jacc = 0.0;
      for (int i = order; i >= 2 * m + 1; --i) jacc = jacc * x + g.dirs[comp][i];
      out.jacobian(q, comp) = fact * jacc;
    }
  }
  return out;
}

}  // namespace tougeron_detail

inline double unscaled_residual(const Problem& problem, const JetPoint<double>& pt, int m,
                                double x, const std::vector<double>& c) {
  EvalEnv<double> env;
  env.d = pt.d;
  env.x = x;
  for (int comp = 0; comp < pt.d; ++comp) {
    double y = 0.0;
    for (int i = m; i >= 0; --i)
      y = y * x + pt.coeff(i)[comp] * inverse_factorial<double>(i);
    double corr = c[comp] * inverse_factorial<double>(m + 1);
    for (int t = 0; t < m + 1; ++t) corr *= x;
    env.y.push_back(y + corr);
  }
  double worst = 0.0;
  for (int q = 0; q < problem.num_eqs_r; ++q)
    worst = std::max(worst, std::abs(eval_expr(*problem.equations[q], env)));
  return worst;
}

inline ContinuationResult continue_correction(const Problem& problem, const JetPoint<double>& pt,
                                              int m, const std::vector<double>& x_samples,
                                              const ContinuationOptions& opts = {}) {
  ContinuationResult result;
  result.limit_value = continuation_limit(problem, pt, m);
  for (double x : x_samples) {
    ContinuationSample sample;
    sample.x = x;
    if (x == 0.0) {
      sample.value = result.limit_value;
      sample.converged = true;
      result.samples.push_back(std::move(sample));
      continue;
    }
    std::vector<double> c = result.limit_value;
    auto phi = tougeron_detail::phi_at(problem, pt, m, x, c, opts.extra_orders);
    sample.outside_radius = phi.outside_radius;
    double mag = max_mag(phi.phi);
    int it = 0;
    for (; it < opts.max_iterations && mag > opts.tolerance; ++it) {
      LinearSolve<double> step = solve_linear(phi.jacobian, negate_vec(phi.phi), problem.tol);
      if (!step.feasible) break;
      double scale = 1.0;
      bool improved = false;
      for (int damp = 0; damp < 12 && !improved; ++damp) {
        std::vector<double> trial = c;
        for (int comp = 0; comp < pt.d; ++comp) trial[comp] += scale * step.particular[comp];
        auto phi_trial = tougeron_detail::phi_at(problem, pt, m, x, trial, opts.extra_orders);
        double trial_mag = max_mag(phi_trial.phi);
        if (trial_mag < mag) {
          c = trial;
          phi = phi_trial;
          mag = trial_mag;
          improved = true;
        } else {
          scale *= 0.5;
        }
      }
      if (!improved) break;
    }
    sample.newton_iterations = it;
    sample.converged = mag <= opts.tolerance;
    sample.scaled_residual = mag;
    sample.value = c;
    sample.unscaled_residual = unscaled_residual(problem, pt, m, x, c);
    result.samples.push_back(std::move(sample));
  }
  return result;
}

struct OrderDiagnostic {
  int det_vanishing_order = -1;       // of det G_y along ybar; -1 when it never clears zero
  int residual_vanishing_order = -1;  // of G along ybar; -1 means zero to the probed order
  int order_available = 0;            // 2m + 1
  int order_required = 0;             // 2 m d
  bool classical_applies = false;
  double leading_coefficient = 0.0;   // det-series coefficient at x^{md}
};

// Jet determinant by Laplace expansion; dimensions here are tiny.
inline Jet<double> jet_det(std::vector<std::vector<Jet<double>>>& m, int size, int order) {
  if (size == 1) return m[0][0];
  Jet<double> acc(order);
  std::vector<std::vector<Jet<double>>> sub(size - 1, std::vector<Jet<double>>(size - 1, Jet<double>(order)));
  for (int col = 0; col < size; ++col) {
    for (int i = 1; i < size; ++i) {
      int jj = 0;
      for (int j = 0; j < size; ++j) {
        if (j == col) continue;
        sub[i - 1][jj++] = m[i][j];
      }
    }
    Jet<double> term = m[0][col] * jet_det(sub, size - 1, order);
    acc = (col % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

inline OrderDiagnostic tougeron_diagnostic(const Problem& problem, const JetPoint<double>& pt,
                                           int m, int probe_orders = 4) {
  if (pt.n != 0) throw usage_error("the diagnostic applies to the algebraic case n = 0 only");
  const int d = pt.d;
  const int order = 2 * m * d + probe_orders;
  OrderDiagnostic diag;
  diag.order_available = 2 * m + 1;
  diag.order_required = 2 * m * d;
  diag.classical_applies = diag.order_available >= diag.order_required;

  // Jacobian entries along the base curve as jets, via one channel per column.
  EvalEnv<SensitivityJet<double>> env;
  env.d = d;
  env.x = SensitivityJet<double>(Jet<double>::variable(order, 0.0), d);
  for (int comp = 0; comp < d; ++comp) {
    Jet<double> y(order);
    for (int i = 0; i <= m && i <= order; ++i)
      y[i] = pt.coeff(i)[comp] * inverse_factorial<double>(i);
    SensitivityJet<double> sy(y, d);
    sy.dirs[comp][0] = 1.0;
    env.y.push_back(std::move(sy));
  }
  std::vector<std::vector<Jet<double>>> jac(d, std::vector<Jet<double>>(d, Jet<double>(order)));
  double residual_scale = 1.0;
  std::vector<Jet<double>> residual;
  for (int q = 0; q < problem.num_eqs_r; ++q) {
    SensitivityJet<double> g = eval_expr(*problem.equations[q], env);
    residual.push_back(g.base);
    residual_scale = std::max(residual_scale, g.base.max_magnitude());
    for (int comp = 0; comp < d; ++comp) jac[q][comp] = g.dirs[comp];
  }
  Jet<double> det = jet_det(jac, d, order);
  const double det_scale = std::max(1.0, det.max_magnitude());
  for (int i = 0; i <= order; ++i)
    if (!is_zero(det[i], problem.tol, det_scale)) {
      diag.det_vanishing_order = i;
      diag.leading_coefficient = det[i];
      break;
    }
  for (int i = 0; i <= order && diag.residual_vanishing_order < 0; ++i)
    for (int q = 0; q < d; ++q)
      if (!is_zero(residual[q][i], problem.tol, residual_scale)) {
        diag.residual_vanishing_order = i;
        break;
      }
  return diag;
}

// Plain series coefficients a_0..a_{m+1+extra} of the continued solution,
// obtained by solving the scaled residual for the correction as a jet in x.
// This is the jet-composed form of the Newton fixed point.
inline std::optional<std::vector<std::vector<double>>> continuation_series(
    const Problem& problem, const JetPoint<double>& pt, int m, int extra,
    const ContinuationOptions& opts = {}) {
  const int d = pt.d;
  const int unknowns = (extra + 1) * d;  // jet coefficients of c(x) through x^extra
  const int order = 2 * m + 1 + extra;
  std::vector<std::vector<double>> cjet(extra + 1, std::vector<double>(d, 0.0));
  cjet[0] = continuation_limit(problem, pt, m);
  for (int it = 0; it < opts.max_iterations; ++it) {
    EvalEnv<SensitivityJet<double>> env;
    env.d = d;
    env.x = SensitivityJet<double>(Jet<double>::variable(order, 0.0), unknowns);
    for (int comp = 0; comp < d; ++comp) {
      Jet<double> y(order);
      for (int i = 0; i <= m; ++i) y[i] = pt.coeff(i)[comp] * inverse_factorial<double>(i);
      for (int t = 0; t <= extra; ++t)
        if (m + 1 + t <= order) y[m + 1 + t] += cjet[t][comp] * inverse_factorial<double>(m + 1);
      SensitivityJet<double> sy(y, unknowns);
      for (int t = 0; t <= extra; ++t)
        if (m + 1 + t <= order)
          sy.dirs[t * d + comp][m + 1 + t] = inverse_factorial<double>(m + 1);
      env.y.push_back(std::move(sy));
    }
    Matrix<double> jac(d * (extra + 1), unknowns);
    std::vector<double> rhs(d * (extra + 1), 0.0);
    for (int q = 0; q < d; ++q) {
      SensitivityJet<double> g = eval_expr(*problem.equations[q], env);
      for (int t = 0; t <= extra; ++t) {
        rhs[t * d + q] = -g.base[2 * m + 1 + t];
        for (int u = 0; u < unknowns; ++u) jac(t * d + q, u) = g.dirs[u][2 * m + 1 + t];
      }
    }
    double mag = max_mag(rhs);
    if (mag <= opts.tolerance) break;
    LinearSolve<double> step = solve_linear(jac, rhs, problem.tol);
    if (!step.feasible) return std::nullopt;
    for (int t = 0; t <= extra; ++t)
      for (int comp = 0; comp < d; ++comp) cjet[t][comp] += step.particular[t * d + comp];
  }
  std::vector<std::vector<double>> series(m + 2 + extra, std::vector<double>(d, 0.0));
  for (int i = 0; i <= m; ++i)
    for (int comp = 0; comp < d; ++comp)
      series[i][comp] = pt.coeff(i)[comp] * inverse_factorial<double>(i);
  for (int t = 0; t <= extra; ++t)
    for (int comp = 0; comp < d; ++comp)
      series[m + 1 + t][comp] += cjet[t][comp] * inverse_factorial<double>(m + 1);
  return series;
}

}  // namespace fps

#endif
