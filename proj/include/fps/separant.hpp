#ifndef FPS_SEPARANT_HPP
#define FPS_SEPARANT_HPP

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fps/expansion.hpp"

namespace fps {

// Upper block-triangular matrix S_k with block (i, p) equal to the partial
// block of order 2i at derivative slot n-(p-i); for k > n it is an upper band
// matrix of block bandwidth n, and S_{k-1} sits in the leading block corner.
template <class K>
struct SeparantMatrix {
  int k = 0, n = 0, r = 1, d = 1;
  Matrix<K> full;
  std::vector<std::vector<Matrix<K>>> blocks;  // blocks[i][p], p = 0..k

  const Matrix<K>& block(int i, int p) const { return blocks[i][p]; }
};

template <class K>
SeparantMatrix<K> assemble_separant(const Problem& problem, const JetPoint<K>& pt, int k) {
  SeparantMatrix<K> s;
  s.k = k;
  s.n = pt.n;
  s.r = problem.num_eqs_r;
  s.d = pt.d;
  s.full = Matrix<K>((k + 1) * s.r, (k + 1) * s.d);
  s.blocks.assign(k + 1, std::vector<Matrix<K>>(k + 1, Matrix<K>(s.r, s.d)));
  for (int i = 0; i <= k; ++i) {
    for (int p = i; p <= k; ++p) {
      int slot = pt.n - (p - i);
      if (slot < 0) continue;
      Matrix<K> b = partial_block(problem, pt, i, slot);
      s.blocks[i][p] = b;
      for (int br = 0; br < s.r; ++br)
        for (int bc = 0; bc < s.d; ++bc) s.full(i * s.r + br, p * s.d + bc) = b(br, bc);
    }
  }
  return s;
}

struct ConditionWitness {
  std::string description;
  double magnitude = 0.0;
};

// Hypothesis verdicts for a given degeneracy level m: the base point is a
// root of G, S_{m-1} vanishes, S_m does not, and the low-order remainder
// conditions hold. Witnesses carry the first offending entry when one fails.
template <class K>
struct ConditionReport {
  int m = 1;
  bool base_point_is_root = false;
  bool prev_separant_zero = false;
  bool separant_nonzero = false;
  bool remainders_zero = false;
  std::vector<ConditionWitness> witnesses;
  std::optional<SeparantMatrix<K>> s_prev;
  SeparantMatrix<K> s_cur;
  std::vector<std::vector<K>> low_order_values;  // T^1..T^{2m}, truncated point
  double scale = 1.0;

  bool all_ok() const {
    return base_point_is_root && prev_separant_zero && separant_nonzero && remainders_zero;
  }

  std::string first_failure() const {
    if (!base_point_is_root) return "base point is not a root of G";
    if (!prev_separant_zero) return "degeneracy condition fails: lower separant matrix is nonzero";
    if (!separant_nonzero) return "degeneracy condition fails: separant matrix at level m is zero";
    if (!remainders_zero) return "remainder conditions fail below the continuation order";
    return "";
  }
};

template <class K>
ConditionReport<K> check_conditions(const Problem& problem, const JetPoint<K>& pt, int m) {
  if (m < 1) throw usage_error("condition check requires m >= 1");
  ConditionReport<K> rep;
  rep.m = m;
  const Tolerance& tol = problem.tol;
  const int n = pt.n;

  // Low-order expansion at the truncated point; used both for the base-point
  // check and the remainder conditions (coefficients beyond m+n are zeroed,
  // under which T^j equals the j-th remainder for j <= 2m once S_{m-1} = 0).
  JetPoint<K> base = pt.truncated(m + n);
  ExpansionCoefficients<K> low = expansion_coefficients(problem, base, 2 * m);
  rep.scale = std::max(1.0, low.max_magnitude());

  rep.base_point_is_root = true;
  for (int q = 0; q < problem.num_eqs_r; ++q) {
    if (!is_zero(low.values[0][q], tol, rep.scale)) {
      rep.base_point_is_root = false;
      std::ostringstream w;
      w << "G[z0] component " << q << " = " << magnitude(low.values[0][q]);
      rep.witnesses.push_back({w.str(), magnitude(low.values[0][q])});
      break;
    }
  }

  rep.s_prev = assemble_separant(problem, pt, m - 1);
  rep.s_cur = assemble_separant(problem, pt, m);
  const double s_scale = std::max({1.0, rep.s_prev->full.max_magnitude(),
                                   rep.s_cur.full.max_magnitude()});

  rep.prev_separant_zero = true;
  for (int i = 0; i < rep.s_prev->full.rows() && rep.prev_separant_zero; ++i)
    for (int j = 0; j < rep.s_prev->full.cols(); ++j)
      if (!is_zero(rep.s_prev->full(i, j), tol, s_scale)) {
        rep.prev_separant_zero = false;
        std::ostringstream w;
        w << "S_" << m - 1 << " entry (" << i << "," << j
          << ") = " << magnitude(rep.s_prev->full(i, j));
        rep.witnesses.push_back({w.str(), magnitude(rep.s_prev->full(i, j))});
        break;
      }

  // "Nonzero" reads entry-wise, exactly as in the hypothesis; rank plays no
  // role here.
  rep.separant_nonzero = !rep.s_cur.full.all_zero(tol, s_scale);
  if (!rep.separant_nonzero)
    rep.witnesses.push_back({"all entries of the level-m separant matrix vanish", 0.0});

  rep.remainders_zero = true;
  rep.low_order_values.assign(low.values.begin() + 1, low.values.end());
  for (int i = 1; i <= 2 * m && rep.remainders_zero; ++i)
    for (int q = 0; q < problem.num_eqs_r; ++q)
      if (!is_zero(low.values[i][q], tol, rep.scale)) {
        rep.remainders_zero = false;
        std::ostringstream w;
        w << "remainder at order " << i << " component " << q << " = "
          << magnitude(low.values[i][q]);
        rep.witnesses.push_back({w.str(), magnitude(low.values[i][q])});
        break;
      }

  return rep;
}

}  // namespace fps

#endif
