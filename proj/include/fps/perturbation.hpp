#ifndef FPS_PERTURBATION_HPP
#define FPS_PERTURBATION_HPP

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fps/solver.hpp"

namespace fps {

// Stability surface: a perturbation of G vanishing to order 2m+1 at the base
// point leaves the level-m hypotheses, the low-order remainders, and the
// indicial polynomial unchanged; only continuation coefficients may move.

template <class K>
struct PerturbationReport {
  int m = 1;
  int required_order = 0;        // 2m+1
  bool order_ok = false;
  int order_witness = -1;        // directional order where the precondition failed
  bool invariants_checked = false;
  bool invariants_equal = false;
  std::vector<std::string> mismatches;
  SolveStatus base_status = SolveStatus::Ok;
  SolveStatus perturbed_status = SolveStatus::Ok;
  long first_divergent_index = -1;  // -1: identical through the compared range
  double divergence_magnitude = 0.0;
};

// Probabilistic multivariate vanishing-order check: expand the expression
// along random integer lines through the base point; every coefficient below
// `order` must vanish on every probed line.
template <class K>
bool vanishing_order_at_least(const Problem& problem, const std::vector<ExprPtr>& exprs,
                              const JetPoint<K>& pt, int order, int* witness_order,
                              unsigned seed = 11) {
  const int n = pt.n, d = pt.d;
  const int dims = 1 + (n + 1) * d;
  std::mt19937 rng(seed);
  std::uniform_int_distribution<long> dist(-9, 9);
  const int trials = 2 * dims + 8;
  const int jet_order = order - 1;
  for (int trial = 0; trial < trials; ++trial) {
    EvalEnv<Jet<K>> env;
    env.d = d;
    Jet<K> x(jet_order);
    if (jet_order >= 1) x[1] = field_traits<K>::from_int(dist(rng));
    env.x = x;
    for (int j = 0; j <= n; ++j)
      for (int comp = 0; comp < d; ++comp) {
        Jet<K> y(jet_order);
        y[0] = pt.coeff(j)[comp];
        if (jet_order >= 1) y[1] = field_traits<K>::from_int(dist(rng));
        env.y.push_back(std::move(y));
      }
    for (const auto& e : exprs) {
      Jet<K> value = eval_expr(*e, env);
      const double scale = std::max(1.0, value.max_magnitude());
      for (int i = 0; i <= jet_order; ++i)
        if (!is_zero(value[i], problem.tol, scale)) {
          if (witness_order) *witness_order = i;
          return false;
        }
    }
  }
  return true;
}

template <class K>
PerturbationReport<K> perturbation_check(const Problem& problem, const JetPoint<K>& pt, int m,
                                         std::vector<ExprPtr> perturbation,
                                         const SolveOptions<K>& opts) {
  if (m < 1) throw usage_error("the stability check requires m >= 1");
  if (static_cast<int>(perturbation.size()) != problem.num_eqs_r)
    throw usage_error("perturbation needs one component per equation");
  for (auto& e : perturbation)
    e = validate_expression(e, problem.deriv_order_n, problem.dim_d, problem.field);

  PerturbationReport<K> rep;
  rep.m = m;
  rep.required_order = 2 * m + 1;
  rep.order_ok = vanishing_order_at_least(problem, perturbation, pt, 2 * m + 1, &rep.order_witness);
  if (!rep.order_ok) return rep;

  Problem perturbed = problem;
  for (int q = 0; q < problem.num_eqs_r; ++q)
    perturbed.equations[q] =
        make_binary(ExprKind::Add, problem.equations[q], perturbation[q]);

  rep.invariants_checked = true;
  rep.invariants_equal = true;
  auto mismatch = [&](const std::string& what) {
    rep.invariants_equal = false;
    rep.mismatches.push_back(what);
  };

  for (int k = 0; k <= m; ++k) {
    auto sa = assemble_separant(problem, pt, k);
    auto sb = assemble_separant(perturbed, pt, k);
    const double scale = std::max({1.0, sa.full.max_magnitude(), sb.full.max_magnitude()});
    for (int i = 0; i < sa.full.rows(); ++i)
      for (int j = 0; j < sa.full.cols(); ++j)
        if (!is_zero(static_cast<K>(sa.full(i, j) - sb.full(i, j)), problem.tol, scale)) {
          std::ostringstream os;
          os << "separant matrix differs at level " << k << " entry (" << i << "," << j << ")";
          mismatch(os.str());
          i = sa.full.rows();
          break;
        }
  }

  for (int j = 1; j <= 2 * m; ++j) {
    int k = (j - 1) / 2;
    int l = (j - 1) % 2;
    auto ra = remainder_vector(problem, pt, k, l);
    auto rb = remainder_vector(perturbed, pt, k, l);
    const double scale = std::max({1.0, max_mag(ra), max_mag(rb)});
    for (int q = 0; q < problem.num_eqs_r; ++q)
      if (!is_zero(static_cast<K>(ra[q] - rb[q]), problem.tol, scale)) {
        std::ostringstream os;
        os << "remainder differs at order " << j << " component " << q;
        mismatch(os.str());
        break;
      }
  }

  auto cond_a = check_conditions(problem, pt, m);
  auto cond_b = check_conditions(perturbed, pt, m);
  if (cond_a.all_ok() && cond_b.all_ok()) {
    auto ia = assemble_indicial(problem, pt, m, cond_a);
    auto ib = assemble_indicial(perturbed, pt, m, cond_b);
    const double scale = std::max({1.0, ia.g.max_magnitude(), ib.g.max_magnitude()});
    Poly<K> diff = ia.g - ib.g;
    if (!diff.is_zero(problem.tol, scale)) mismatch("indicial polynomial differs");
  } else if (cond_a.all_ok() != cond_b.all_ok()) {
    mismatch("hypothesis verdicts differ between the two problems");
  }

  SolveOutcome<K> base = solve(problem, pt, opts);
  SolveOutcome<K> pert = solve(perturbed, pt, opts);
  rep.base_status = base.status;
  rep.perturbed_status = pert.status;
  if (base.ok() && pert.ok()) {
    const auto& ca = base.family->coefficients;
    const auto& cb = pert.family->coefficients;
    const std::size_t count = std::min(ca.size(), cb.size());
    for (std::size_t i = 0; i < count && rep.first_divergent_index < 0; ++i) {
      double scale = std::max({1.0, max_mag(ca[i]), max_mag(cb[i])});
      for (int c = 0; c < problem.dim_d; ++c)
        if (!is_zero(static_cast<K>(ca[i][c] - cb[i][c]), problem.tol, scale)) {
          rep.first_divergent_index = static_cast<long>(i);
          rep.divergence_magnitude = magnitude(static_cast<K>(ca[i][c] - cb[i][c]));
          break;
        }
    }
  }
  return rep;
}

}  // namespace fps

#endif
