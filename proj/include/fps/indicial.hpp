#ifndef FPS_INDICIAL_HPP
#define FPS_INDICIAL_HPP

#include <optional>
#include <vector>

#include "fps/separant.hpp"

namespace fps {

struct overdetermined_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct hypothesis_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IntegerRootScan {
  std::vector<long> roots;
  std::vector<long> borderline;  // inexact modes: near-threshold values
  double bound = 0.0;
  bool truncated = false;
};

// Nonnegative integer roots by direct scan of 0..floor(B), B the Cauchy bound
// 1 + max_{i<deg} |a_i| / |a_deg|. Exact scalars test exactly; inexact ones
// accept |g(l)| <= atol + rtol * (max coefficient magnitude) and flag
// near-threshold values as borderline.
template <class K>
IntegerRootScan integer_root_scan(const Poly<K>& g, const Tolerance& tol,
                                  long scan_cap = 1000000) {
  IntegerRootScan out;
  const int deg = g.degree();
  if (deg == 0) {
    out.bound = 0.0;
    return out;
  }
  double lead = magnitude(g[deg]);
  double top = 0.0;
  for (int i = 0; i < deg; ++i) top = std::max(top, magnitude(g[i]));
  out.bound = 1.0 + (lead > 0.0 ? top / lead : 0.0);
  long limit = static_cast<long>(out.bound) + 1;
  if (limit > scan_cap) {
    limit = scan_cap;
    out.truncated = true;
  }
  const double scale = std::max(1.0, g.max_magnitude());
  const double threshold = tol.threshold(scale);
  for (long l = 0; l <= limit; ++l) {
    K value = g.eval(field_traits<K>::from_int(l));
    if constexpr (field_traits<K>::is_exact) {
      if (value == field_traits<K>::zero()) out.roots.push_back(l);
    } else {
      double mag = magnitude(value);
      if (mag <= threshold)
        out.roots.push_back(l);
      else if (mag <= 1000.0 * threshold)
        out.borderline.push_back(l);
    }
  }
  return out;
}

// Indicial data at level m: the polynomial matrix H(l) built from the last
// block column of the separant matrix with the binomial weights as degree-i
// polynomials in l, the indicial polynomial g = det H (square case) or the
// full list of r-by-r minors (underdetermined case), and the integer roots.
template <class K>
struct IndicialSystem {
  int m = 1, n = 0, d = 1, r = 1;
  PolyMatrix<K> h;
  Poly<K> g;
  std::vector<Poly<K>> minors;
  std::vector<long> roots;
  std::vector<long> borderline_roots;
  double root_bound = 0.0;
  bool scan_truncated = false;
  bool identically_zero = false;
  bool scalar_route = false;
};

template <class K>
IndicialSystem<K> assemble_indicial(const Problem& problem, const JetPoint<K>& pt, int m,
                                    const ConditionReport<K>& conditions,
                                    bool scalar_route = false) {
  if (problem.overdetermined())
    throw overdetermined_error(
        "overdetermined systems (r > d) are outside the supported analysis");
  if (!conditions.base_point_is_root || !conditions.prev_separant_zero)
    throw hypothesis_error("indicial assembly requires the degeneracy conditions: " +
                           conditions.first_failure());
  if (scalar_route && (problem.dim_d != 1 || problem.num_eqs_r != 1))
    throw usage_error("scalar route requires d = r = 1");

  IndicialSystem<K> sys;
  sys.m = m;
  sys.n = pt.n;
  sys.d = pt.d;
  sys.r = problem.num_eqs_r;
  sys.scalar_route = scalar_route;

  sys.h = PolyMatrix<K>(sys.r, sys.d);
  for (int i = 0; i <= m; ++i) {
    Matrix<K> block = partial_block(problem, pt, i, pt.n - m + i);
    Poly<K> weight = poly_to_field<K>(gamma_weight_poly(m, i));
    for (int row = 0; row < sys.r; ++row)
      for (int col = 0; col < sys.d; ++col)
        sys.h(row, col) = sys.h(row, col) + block(row, col) * weight;
  }

  const Tolerance& tol = problem.tol;
  const double scale = std::max(1.0, sys.h.max_magnitude());
  if (sys.r == sys.d) {
    sys.g = scalar_route ? sys.h(0, 0) : poly_det(sys.h, tol);
    sys.identically_zero = sys.g.is_zero(tol, scale);
    if (!sys.identically_zero) {
      IntegerRootScan scan = integer_root_scan(sys.g, tol);
      sys.roots = scan.roots;
      sys.borderline_roots = scan.borderline;
      sys.root_bound = scan.bound;
      sys.scan_truncated = scan.truncated;
    }
  } else {
    sys.minors = poly_row_minors(sys.h, tol);
    sys.identically_zero = true;
    for (const auto& minor : sys.minors)
      if (!minor.is_zero(tol, scale)) sys.identically_zero = false;
    if (!sys.identically_zero) {
      // A rank drop needs every minor to vanish, so any one nonzero minor
      // bounds the scan.
      double bound = 0.0;
      bool have = false;
      for (const auto& minor : sys.minors) {
        if (minor.is_zero(tol, scale) || minor.degree() == 0) continue;
        IntegerRootScan scan = integer_root_scan(minor, tol);
        if (!have || scan.bound < bound) bound = scan.bound;
        have = true;
      }
      sys.root_bound = bound;
      long limit = static_cast<long>(bound) + 1;
      const double threshold = tol.threshold(scale);
      for (long l = 0; l <= limit; ++l) {
        bool all_zero = true, any_clear = false;
        for (const auto& minor : sys.minors) {
          K value = minor.eval(field_traits<K>::from_int(l));
          if constexpr (field_traits<K>::is_exact) {
            if (value != field_traits<K>::zero()) all_zero = false;
          } else {
            double mag = magnitude(value);
            if (mag > threshold) {
              all_zero = false;
              if (mag > 1000.0 * threshold) any_clear = true;
            }
          }
        }
        if (all_zero)
          sys.roots.push_back(l);
        else if (!any_clear)
          sys.borderline_roots.push_back(l);
      }
    }
  }
  return sys;
}

template <class K>
struct MembershipResult {
  bool feasible = false;
  std::vector<K> particular;
  double residual = 0.0;
};

// Rank, nullspace, and a range-membership test for H evaluated at one root.
template <class K>
struct RootSpace {
  long root = 0;
  Matrix<K> h_at;
  int rank = 0;
  std::vector<std::vector<K>> nullspace;
  Tolerance tol;

  MembershipResult<K> membership(const std::vector<K>& v) const {
    LinearSolve<K> sol = solve_linear(h_at, v, tol);
    MembershipResult<K> out;
    out.feasible = sol.feasible;
    out.residual = sol.residual;
    if (sol.feasible) out.particular = sol.particular;
    return out;
  }
};

template <class K>
RootSpace<K> root_subspaces(const IndicialSystem<K>& sys, long root, const Tolerance& tol) {
  RootSpace<K> space;
  space.root = root;
  space.tol = tol;
  space.h_at = sys.h.eval_at(field_traits<K>::from_int(root));
  LinearSolve<K> sol = solve_linear(space.h_at,
                                    std::vector<K>(sys.r, field_traits<K>::zero()), tol);
  space.rank = sol.rank;
  space.nullspace = sol.nullspace;
  return space;
}

}  // namespace fps

#endif
