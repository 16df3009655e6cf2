#ifndef FPS_ORACLE_HPP
#define FPS_ORACLE_HPP

#include <map>
#include <vector>

#include "fps/eval.hpp"
#include "fps/expansion.hpp"

namespace fps {

// Brute-force undetermined-coefficients solver. It imposes the series
// conditions order by order with generic linear algebra on sensitivities and
// knows nothing about the separant decomposition; it is the independent
// cross-check for the structured solver.

template <class K>
struct OracleResult {
  bool feasible = true;
  int failure_order = -1;
  double failure_magnitude = 0.0;
  std::string note;
  std::vector<std::vector<K>> coefficients;
  std::vector<long> free_indices;  // never determined by any order condition
};

namespace oracle_detail {

// Plain jets straight from a coefficient table: slot j at position t carries
// c_{t+j} / t!, and x carries eps.
template <class K>
EvalEnv<Jet<K>> table_env(int n, int d, const std::vector<std::vector<K>>& table, int order) {
  EvalEnv<Jet<K>> env;
  env.d = d;
  env.x = Jet<K>::variable(order, field_traits<K>::zero());
  for (int j = 0; j <= n; ++j) {
    for (int comp = 0; comp < d; ++comp) {
      Jet<K> jet(order);
      for (int t = 0; t <= order; ++t) {
        std::size_t idx = static_cast<std::size_t>(t + j);
        K value = idx < table.size() ? table[idx][comp] : field_traits<K>::zero();
        jet[t] = value * inverse_factorial<K>(t);
      }
      env.y.push_back(std::move(jet));
    }
  }
  return env;
}

// Sensitivity channels with respect to whole series coefficients: channel
// (u, comp) seeds every slot j at position u - j.
template <class K>
EvalEnv<SensitivityJet<K>> table_sens_env(int n, int d, const std::vector<std::vector<K>>& table,
                                          int order,
                                          const std::vector<std::pair<long, int>>& unknowns) {
  EvalEnv<Jet<K>> base = table_env(n, d, table, order);
  EvalEnv<SensitivityJet<K>> env;
  env.d = d;
  env.x = SensitivityJet<K>(base.x, unknowns.size());
  for (int j = 0; j <= n; ++j) {
    for (int comp = 0; comp < d; ++comp) {
      SensitivityJet<K> value(base.y[static_cast<std::size_t>(j) * d + comp], unknowns.size());
      for (std::size_t ch = 0; ch < unknowns.size(); ++ch) {
        auto [u, ucomp] = unknowns[ch];
        if (ucomp != comp) continue;
        long pos = u - j;
        if (pos >= 0 && pos <= order) value.dirs[ch][pos] = inverse_factorial<K>(static_cast<int>(pos));
      }
      env.y.push_back(std::move(value));
    }
  }
  return env;
}

}  // namespace oracle_detail

template <class K>
double detail_scale(const std::vector<K>& value, const std::vector<std::vector<K>>& table) {
  double s = 0.0;
  for (const K& v : value) s = std::max(s, magnitude(v));
  for (const auto& row : table)
    for (const K& v : row) s = std::max(s, magnitude(v));
  return s;
}

template <class K>
OracleResult<K> brute_force_solve(const Problem& problem,
                                  const std::vector<std::vector<K>>& base_coeffs, int top_index,
                                  const std::map<long, std::vector<K>>& free_values = {},
                                  int max_restarts = 10) {
  const int n = problem.deriv_order_n;
  const int d = problem.dim_d;
  const int r = problem.num_eqs_r;
  const int max_order = top_index - n;

  OracleResult<K> out;
  std::map<std::pair<long, int>, K> pinned;  // values forced by restarts

  for (int restart = 0; restart <= max_restarts; ++restart) {
    std::vector<std::vector<K>> table(top_index + 1, std::vector<K>(d, field_traits<K>::zero()));
    std::vector<std::vector<bool>> fixed(top_index + 1, std::vector<bool>(d, false));
    std::vector<std::vector<int>> first_use(top_index + 1, std::vector<int>(d, -1));
    for (std::size_t i = 0; i < base_coeffs.size() && i < table.size(); ++i) {
      table[i] = base_coeffs[i];
      fixed[i].assign(d, true);
    }
    for (const auto& [idx, vals] : free_values)
      if (idx <= top_index && !fixed[idx][0])
        for (int c = 0; c < d && c < static_cast<int>(vals.size()); ++c) table[idx][c] = vals[c];
    for (const auto& [key, value] : pinned) {
      auto [u, comp] = key;
      if (u <= top_index) {
        table[u][comp] = value;
        fixed[u][comp] = true;
      }
    }

    bool restarted = false;
    out = OracleResult<K>{};
    for (int order = 0; order <= max_order && !restarted; ++order) {
      std::vector<std::pair<long, int>> unknowns;
      for (long u = std::min<long>(order + n, top_index); u >= 0; --u)
        for (int comp = 0; comp < d; ++comp)
          if (!fixed[u][comp]) unknowns.emplace_back(u, comp);
      for (auto [u, comp] : unknowns)
        if (first_use[u][comp] < 0) first_use[u][comp] = order;

      auto eval_t = [&]() {
        EvalEnv<Jet<K>> env = oracle_detail::table_env(n, d, table, order);
        std::vector<K> t(r);
        const K fact = field_traits<K>::from_rational(factorial_rat(order));
        for (int q = 0; q < r; ++q) t[q] = fact * eval_expr(*problem.equations[q], env)[order];
        return t;
      };

      std::vector<K> value = eval_t();
      double scale = std::max(1.0, detail_scale(value, table));
      if (unknowns.empty()) {
        if (!all_zero_vec(value, problem.tol, scale)) {
          out.feasible = false;
          out.failure_order = order;
          out.failure_magnitude = max_mag(value);
          out.note = "inconsistent order condition with no unknowns available";
          out.coefficients = table;
          return out;
        }
        continue;
      }

      // Sensitivities of this order condition to every live unknown.
      EvalEnv<SensitivityJet<K>> senv =
          oracle_detail::table_sens_env(n, d, table, order, unknowns);
      Matrix<K> jac(r, static_cast<int>(unknowns.size()));
      const K fact = field_traits<K>::from_rational(factorial_rat(order));
      for (int q = 0; q < r; ++q) {
        SensitivityJet<K> g = eval_expr(*problem.equations[q], senv);
        for (std::size_t ch = 0; ch < unknowns.size(); ++ch)
          jac(q, static_cast<int>(ch)) = fact * g.dirs[ch][order];
      }
      const double jac_scale = std::max(1.0, jac.max_magnitude());
      std::vector<int> live;
      for (std::size_t ch = 0; ch < unknowns.size(); ++ch) {
        bool nonzero = false;
        for (int q = 0; q < r; ++q)
          if (!is_zero(jac(q, static_cast<int>(ch)), problem.tol, jac_scale)) nonzero = true;
        if (nonzero) live.push_back(static_cast<int>(ch));
      }

      if (live.empty()) {
        if (!all_zero_vec(value, problem.tol, scale)) {
          out.feasible = false;
          out.failure_order = order;
          out.failure_magnitude = max_mag(value);
          out.note = "order condition is inconsistent and touches no free coefficient";
          out.coefficients = table;
          return out;
        }
        continue;
      }
      if (all_zero_vec(value, problem.tol, scale)) {
        // Even when satisfied, a condition with live sensitivities still
        // determines its pivots; solve so the coefficient is not mistaken for
        // a free one (the solve returns a zero update).
      }

      bool solved = false;
      for (int newton = 0; newton < 30 && !solved; ++newton) {
        Matrix<K> sub(r, static_cast<int>(live.size()));
        for (int q = 0; q < r; ++q)
          for (std::size_t c = 0; c < live.size(); ++c) sub(q, static_cast<int>(c)) = jac(q, live[c]);
        LinearSolve<K> sol = solve_linear(sub, negate_vec(value), problem.tol);
        if (!sol.feasible) {
          out.feasible = false;
          out.failure_order = order;
          out.failure_magnitude = sol.residual;
          out.note = "order condition not solvable for the live coefficients";
          out.coefficients = table;
          return out;
        }
        for (std::size_t c = 0; c < live.size(); ++c) {
          auto [u, comp] = unknowns[live[c]];
          table[u][comp] = table[u][comp] + sol.particular[c];
        }
        value = eval_t();
        scale = std::max(1.0, detail_scale(value, table));
        solved = all_zero_vec(value, problem.tol, scale);
        if (!solved) {
          // refresh the sensitivities at the moved point (nonlinear case)
          EvalEnv<SensitivityJet<K>> senv2 =
              oracle_detail::table_sens_env(n, d, table, order, unknowns);
          for (int q = 0; q < r; ++q) {
            SensitivityJet<K> g = eval_expr(*problem.equations[q], senv2);
            for (std::size_t ch = 0; ch < unknowns.size(); ++ch)
              jac(q, static_cast<int>(ch)) = fact * g.dirs[ch][order];
          }
        }
        // only pivot coordinates are treated as determined
        if (solved) {
          for (int pc : sol.pivot_columns) {
            auto [u, comp] = unknowns[live[pc]];
            fixed[u][comp] = true;
            if (first_use[u][comp] >= 0 && first_use[u][comp] < order &&
                !is_zero(sol.particular[pc], problem.tol, scale)) {
              // an earlier order already consumed this coefficient's previous
              // value: pin the new value and recompute everything
              pinned[{u, comp}] = table[u][comp];
              restarted = true;
            }
          }
        }
      }
      if (!solved && !restarted) {
        out.feasible = false;
        out.failure_order = order;
        out.failure_magnitude = max_mag(value);
        out.note = "order condition did not converge for the live coefficients";
        out.coefficients = table;
        return out;
      }
    }
    if (restarted) continue;

    out.coefficients = table;
    for (long u = 0; u <= top_index; ++u)
      for (int comp = 0; comp < d; ++comp)
        if (!fixed[u][comp]) {
          out.free_indices.push_back(u);
          break;
        }
    return out;
  }
  out.feasible = false;
  out.note = "restart budget exhausted";
  return out;
}

// Central finite differences of T^{2i} against the sensitivity-based partial
// block; returns the worst relative deviation over the d coordinates.
inline double fd_check_partials(const Problem& problem, const JetPoint<double>& pt, int i, int j,
                                double step = 1e-6) {
  Matrix<double> analytic = partial_block(problem, pt, i, j);
  const int order = 2 * i;
  double worst = 0.0;
  for (int comp = 0; comp < pt.d; ++comp) {
    auto shifted_t = [&](double bump) {
      EvalEnv<Jet<double>> env = oracle_detail::table_env(pt.n, pt.d, pt.coeffs, order);
      if (j >= 0 && j <= pt.n && i <= order)
        env.y[static_cast<std::size_t>(j) * pt.d + comp][i] += bump * inverse_factorial<double>(i);
      std::vector<double> t(problem.num_eqs_r);
      const double fact = factorial_rat(order).get_d();
      for (int q = 0; q < problem.num_eqs_r; ++q)
        t[q] = fact * eval_expr(*problem.equations[q], env)[order];
      return t;
    };
    auto up = shifted_t(step), down = shifted_t(-step);
    for (int q = 0; q < problem.num_eqs_r; ++q) {
      double fd = (up[q] - down[q]) / (2 * step);
      double scale = std::max(1.0, std::abs(analytic(q, comp)));
      worst = std::max(worst, std::abs(fd - analytic(q, comp)) / scale);
    }
  }
  return worst;
}

}  // namespace fps

#endif
