#ifndef FPS_SOLVER_HPP
#define FPS_SOLVER_HPP

#include <map>
#include <set>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fps/indicial.hpp"

namespace fps {

enum class SolveStatus {
  Ok,
  HypothesisFailure,
  IndicialIdenticallyZero,
  InfeasibleRoot,
  Overdetermined,
  SingularLeadingBlock,  // m = 0 extension refused
  NumericalBreakdown,
};

inline const char* solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Ok: return "ok";
    case SolveStatus::HypothesisFailure: return "hypothesis-failure";
    case SolveStatus::IndicialIdenticallyZero: return "indicial-identically-zero";
    case SolveStatus::InfeasibleRoot: return "infeasible-root";
    case SolveStatus::Overdetermined: return "overdetermined";
    case SolveStatus::SingularLeadingBlock: return "singular-leading-block";
    case SolveStatus::NumericalBreakdown: return "numerical-breakdown";
  }
  return "?";
}

template <class K>
struct FreeSlot {
  long root = 0;
  long coeff_index = 0;
  std::vector<K> offset;                   // particular continuation value
  std::vector<std::vector<K>> directions;  // free directions (nullspace basis)
  std::vector<K> parameters;               // chosen coordinates along directions
  bool parameters_supplied = false;
  bool parameters_forced = false;          // pinned by a later root's solvability
};

struct SolvabilityRecord {
  long root = 0;
  bool feasible = false;
  double residual = 0.0;
  bool forced_earlier_parameters = false;
  std::string note;
};

template <class K>
struct ResidualCertificate {
  int checked_order = 0;
  int samples = 0;
  bool pass = false;
  double max_residual = 0.0;
  int first_failing_order = -1;
};

template <class K>
struct SolutionFamily {
  int m = 1, n = 0, d = 1, r = 1;
  int order = 0;  // series order N; the table runs c_0 .. c_{N+n}
  std::vector<std::vector<K>> coefficients;
  std::vector<FreeSlot<K>> free_slots;
  std::vector<SolvabilityRecord> solvability;
  long mid_band_lo = 0, mid_band_hi = -1;  // the order-theoretic "arbitrary" band
  int family_dimension = 0;
  int per_order_free_dims = 0;  // r < d: directions fixed to zero at every order
  bool regular_extension = false;
  bool scalar_route = false;
  ResidualCertificate<K> certificate;
};

template <class K>
struct SolveOptions {
  int m = 1;
  int order = 8;
  bool scalar_route = false;  // d = r = 1 scalar-division recursion
  std::map<long, std::vector<K>> free_parameters;  // coefficient index -> coords
  long search_range = 6;       // grid half-width for nonaffine solvability search
  int search_budget = 4000;    // max grid points per resolution
  int max_resolutions = 8;
  unsigned rng_seed = 20240801;
};

template <class K>
struct SolveOutcome {
  SolveStatus status = SolveStatus::Ok;
  std::string message;
  std::optional<ConditionReport<K>> conditions;
  std::optional<IndicialSystem<K>> indicial;
  std::optional<SolutionFamily<K>> family;
  long failed_root = -1;
  double witness = 0.0;

  bool ok() const { return status == SolveStatus::Ok; }
};

template <class K>
bool is_zero_gap(const std::vector<K>& gap, const Tolerance& tol, double scale) {
  for (const K& v : gap)
    if (!is_zero(v, tol, scale)) return false;
  return true;
}

namespace detail {

template <class K>
std::vector<K> negate(std::vector<K> v) {
  for (K& x : v) x = -x;
  return v;
}

template <class K>
double vec_magnitude(const std::vector<K>& v) {
  double m = 0.0;
  for (const K& x : v) m = std::max(m, magnitude(x));
  return m;
}

// One full pass of the coefficient recursion at fixed parameter choices.
template <class K>
struct Attempt {
  bool ok = false;
  long failed_root = -1;
  double witness = 0.0;
  std::string message;
  std::vector<std::vector<K>> table;
  std::vector<FreeSlot<K>> slots;
  std::vector<SolvabilityRecord> solvability;
};

template <class K>
class ContinuationEngine {
 public:
  ContinuationEngine(const Problem& problem, const JetPoint<K>& base, int m,
                     const IndicialSystem<K>& sys, const SolveOptions<K>& opts)
      : problem_(problem), base_(base), m_(m), sys_(sys), opts_(opts) {
    for (long root : sys_.roots) root_space_.emplace(root, root_subspaces(sys_, root, problem_.tol));
  }

  long top_index() const { return static_cast<long>(opts_.order) + base_.n; }
  long coeff_index(long l) const { return m_ + 1 + l + base_.n; }
  long l_max() const { return top_index() - coeff_index(0); }

  bool is_root(long l) const { return root_space_.count(l) != 0; }

  // params: coefficient index -> coordinates along that slot's directions.
  Attempt<K> run(const std::map<long, std::vector<K>>& params,
                 const std::map<long, bool>& forced) const {
    Attempt<K> at;
    at.table.assign(base_.coeffs.begin(), base_.coeffs.end());
    at.table.resize(m_ + base_.n + 1, std::vector<K>(base_.d, field_traits<K>::zero()));
    for (long l = 0; l <= l_max(); ++l) {
      JetPoint<K> current(base_.n, base_.d, at.table);
      std::vector<K> rbar = remainder_vector(problem_, current, m_, static_cast<int>(l));
      const long idx = coeff_index(l);
      if (is_root(l)) {
        const RootSpace<K>& space = root_space_.at(l);
        MembershipResult<K> mem = space.membership(negate(rbar));
        SolvabilityRecord rec;
        rec.root = l;
        rec.feasible = mem.feasible;
        rec.residual = mem.residual;
        if (!mem.feasible) {
          at.solvability.push_back(rec);
          at.failed_root = l;
          at.witness = mem.residual;
          std::ostringstream msg;
          msg << "no continuation through root l = " << l
              << ": remainder lies outside the range of H(l), defect magnitude " << mem.residual;
          at.message = msg.str();
          return at;
        }
        FreeSlot<K> slot;
        slot.root = l;
        slot.coeff_index = idx;
        slot.offset = mem.particular;
        slot.directions = space.nullspace;
        auto it = params.find(idx);
        slot.parameters.assign(slot.directions.size(), field_traits<K>::zero());
        if (it != params.end()) {
          for (std::size_t s = 0; s < slot.parameters.size() && s < it->second.size(); ++s)
            slot.parameters[s] = it->second[s];
          slot.parameters_supplied = opts_.free_parameters.count(idx) != 0;
        }
        auto fit = forced.find(idx);
        slot.parameters_forced = fit != forced.end() && fit->second;
        std::vector<K> value = slot.offset;
        for (std::size_t s = 0; s < slot.directions.size(); ++s)
          for (int c = 0; c < base_.d; ++c)
            value[c] = value[c] + slot.parameters[s] * slot.directions[s][c];
        at.table.push_back(std::move(value));
        at.slots.push_back(std::move(slot));
        at.solvability.push_back(rec);
      } else {
        Matrix<K> h_at = sys_.h.eval_at(field_traits<K>::from_int(l));
        std::vector<K> value;
        if (sys_.scalar_route) {
          K g = h_at(0, 0);
          value.assign(1, -(rbar[0] / g));
        } else {
          LinearSolve<K> sol = solve_linear(h_at, negate(rbar), problem_.tol);
          if (!sol.feasible) {
            at.failed_root = l;
            at.witness = sol.residual;
            std::ostringstream msg;
            msg << "linear step at order shift l = " << l
                << " is numerically inconsistent (defect " << sol.residual << ")";
            at.message = msg.str();
            return at;
          }
          value = sol.particular;
        }
        at.table.push_back(std::move(value));
      }
    }
    at.ok = true;
    return at;
  }

  // Stacked left-nullspace gap of the membership condition at `root` given
  // parameter choices; empty gap means the range condition holds.
  std::optional<std::vector<K>> membership_gap(const std::map<long, std::vector<K>>& params,
                                               const std::map<long, bool>& forced,
                                               long root) const {
    Attempt<K> at;
    at.table.assign(base_.coeffs.begin(), base_.coeffs.end());
    at.table.resize(m_ + base_.n + 1, std::vector<K>(base_.d, field_traits<K>::zero()));
    const auto& w = left_null_.at(root);
    for (long l = 0; l < root; ++l) {
      JetPoint<K> current(base_.n, base_.d, at.table);
      std::vector<K> rbar = remainder_vector(problem_, current, m_, static_cast<int>(l));
      const long idx = coeff_index(l);
      if (is_root(l)) {
        const RootSpace<K>& space = root_space_.at(l);
        MembershipResult<K> mem = space.membership(negate(rbar));
        if (!mem.feasible) return std::nullopt;
        std::vector<K> value = mem.particular;
        auto it = params.find(idx);
        if (it != params.end())
          for (std::size_t s = 0; s < space.nullspace.size() && s < it->second.size(); ++s)
            for (int c = 0; c < base_.d; ++c)
              value[c] = value[c] + it->second[s] * space.nullspace[s][c];
        at.table.push_back(std::move(value));
      } else {
        Matrix<K> h_at = sys_.h.eval_at(field_traits<K>::from_int(l));
        if (sys_.scalar_route) {
          at.table.push_back({-(rbar[0] / h_at(0, 0))});
        } else {
          LinearSolve<K> sol = solve_linear(h_at, negate(rbar), problem_.tol);
          if (!sol.feasible) return std::nullopt;
          at.table.push_back(sol.particular);
        }
      }
    }
    JetPoint<K> current(base_.n, base_.d, at.table);
    std::vector<K> rbar = remainder_vector(problem_, current, m_, static_cast<int>(root));
    std::vector<K> gap;
    for (const auto& wrow : w) {
      K acc = field_traits<K>::zero();
      for (int q = 0; q < problem_.num_eqs_r; ++q) acc = acc + wrow[q] * rbar[q];
      gap.push_back(acc);
    }
    (void)forced;
    return gap;
  }

  void prepare_left_nullspaces() {
    for (long root : sys_.roots) {
      const RootSpace<K>& space = root_space_.at(root);
      left_null_[root] = left_nullspace_basis(space.h_at, problem_.tol);
    }
  }

  const std::map<long, RootSpace<K>>& root_spaces() const { return root_space_; }

 private:
  const Problem& problem_;
  JetPoint<K> base_;
  int m_;
  const IndicialSystem<K>& sys_;
  const SolveOptions<K>& opts_;
  std::map<long, RootSpace<K>> root_space_;
  std::map<long, std::vector<std::vector<K>>> left_null_;
};

}  // namespace detail

// Residual check on a plain coefficient table: every expansion coefficient of
// G through the checked order must vanish.
template <class K>
ResidualCertificate<K> residual_certificate(const Problem& problem,
                                            const std::vector<std::vector<K>>& table, int n,
                                            int check_order) {
  ResidualCertificate<K> cert;
  cert.checked_order = check_order;
  cert.samples = 1;
  JetPoint<K> pt(n, problem.dim_d, table);
  ExpansionCoefficients<K> t = expansion_coefficients(problem, pt, check_order);
  const double scale = std::max(1.0, t.max_magnitude());
  cert.pass = true;
  for (int i = 0; i <= check_order; ++i) {
    for (int q = 0; q < problem.num_eqs_r; ++q) {
      double mag = magnitude(t.values[i][q]);
      cert.max_residual = std::max(cert.max_residual, mag);
      if (!is_zero(t.values[i][q], problem.tol, scale) && cert.first_failing_order < 0) {
        cert.pass = false;
        cert.first_failing_order = i;
      }
    }
  }
  return cert;
}

template <class K>
SolveOutcome<K> solve(const Problem& problem, const JetPoint<K>& base,
                      const SolveOptions<K>& opts);

// Classical nondegenerate recursion (m = 0); not covered by the degeneracy
// theory, flagged as an extension in reports.
template <class K>
SolveOutcome<K> solve_regular(const Problem& problem, const JetPoint<K>& base,
                              SolveOptions<K> opts) {
  SolveOutcome<K> out;
  if (problem.overdetermined()) {
    out.status = SolveStatus::Overdetermined;
    out.message = "overdetermined systems (r > d) are outside the supported analysis";
    return out;
  }
  opts.m = 0;
  const int n = base.n;
  ExpansionCoefficients<K> t0 = expansion_coefficients(problem, base.truncated(n), 0);
  const double scale = std::max(1.0, t0.max_magnitude());
  for (int q = 0; q < problem.num_eqs_r; ++q)
    if (!is_zero(t0.values[0][q], problem.tol, scale)) {
      out.status = SolveStatus::HypothesisFailure;
      out.message = "base point is not a root of G";
      out.witness = magnitude(t0.values[0][q]);
      return out;
    }

  IndicialSystem<K> sys;
  sys.m = 0;
  sys.n = n;
  sys.d = base.d;
  sys.r = problem.num_eqs_r;
  sys.scalar_route = opts.scalar_route && problem.dim_d == 1 && problem.num_eqs_r == 1;
  Matrix<K> lead = partial_block(problem, base, 0, n);
  sys.h = PolyMatrix<K>(sys.r, sys.d);
  for (int i = 0; i < sys.r; ++i)
    for (int j = 0; j < sys.d; ++j) sys.h(i, j) = Poly<K>::constant(lead(i, j));
  if (problem.square()) {
    K det = determinant(lead, problem.tol);
    sys.g = Poly<K>::constant(det);
    if (is_zero(det, problem.tol, std::max(1.0, lead.max_magnitude()))) {
      out.status = SolveStatus::SingularLeadingBlock;
      out.message =
          "leading separant block is singular; the nondegenerate recursion does not apply "
          "(analyze with m >= 1)";
      out.indicial = sys;
      return out;
    }
  } else {
    if (matrix_rank(lead, problem.tol) < sys.r) {
      out.status = SolveStatus::SingularLeadingBlock;
      out.message = "leading separant block has deficient rank; analyze with m >= 1";
      out.indicial = sys;
      return out;
    }
  }
  out.indicial = sys;

  detail::ContinuationEngine<K> engine(problem, base.truncated(n), 0, sys, opts);
  detail::Attempt<K> at = engine.run({}, {});
  if (!at.ok) {
    out.status = SolveStatus::NumericalBreakdown;
    out.message = at.message;
    out.witness = at.witness;
    return out;
  }
  SolutionFamily<K> fam;
  fam.m = 0;
  fam.n = n;
  fam.d = base.d;
  fam.r = problem.num_eqs_r;
  fam.order = opts.order;
  fam.coefficients = std::move(at.table);
  fam.regular_extension = true;
  fam.scalar_route = sys.scalar_route;
  fam.per_order_free_dims = problem.dim_d - problem.num_eqs_r;
  fam.mid_band_lo = n + 1;
  fam.mid_band_hi = n;  // empty band for m = 0
  fam.certificate = residual_certificate(problem, fam.coefficients, n, opts.order);
  out.family = std::move(fam);
  return out;
}

// The degenerate continuation: verifies the level-m hypotheses, builds the
// indicial system, and runs the recursion with range conditions and free
// coefficients at the nonnegative integer roots. Later roots may pin earlier
// free parameters; affine dependence is detected by collinearity probing and
// solved linearly, anything else falls back to a bounded sampling search.
template <class K>
SolveOutcome<K> solve(const Problem& problem, const JetPoint<K>& base,
                      const SolveOptions<K>& opts) {
  SolveOutcome<K> out;
  if (opts.m == 0) return solve_regular(problem, base, opts);
  if (opts.order < opts.m + base.n + 1) {
    out.status = SolveStatus::HypothesisFailure;
    out.message = "series order must be at least m + n + 1";
    return out;
  }
  if (problem.overdetermined()) {
    out.status = SolveStatus::Overdetermined;
    out.message = "overdetermined systems (r > d) are outside the supported analysis";
    return out;
  }

  ConditionReport<K> rep = check_conditions(problem, base, opts.m);
  out.conditions = rep;
  if (!rep.all_ok()) {
    out.status = SolveStatus::HypothesisFailure;
    out.message = rep.first_failure();
    if (!rep.witnesses.empty()) out.witness = rep.witnesses.front().magnitude;
    return out;
  }

  IndicialSystem<K> sys =
      assemble_indicial(problem, base, opts.m, rep, opts.scalar_route && problem.square() &&
                                                        problem.dim_d == 1);
  out.indicial = sys;
  if (sys.identically_zero) {
    out.status = SolveStatus::IndicialIdenticallyZero;
    out.message =
        "indicial polynomial vanishes identically; the recursion cannot start at this level";
    return out;
  }

  detail::ContinuationEngine<K> engine(problem, base, opts.m, sys, opts);
  engine.prepare_left_nullspaces();

  std::map<long, std::vector<K>> params;
  for (const auto& [idx, coords] : opts.free_parameters) params[idx] = coords;
  std::map<long, bool> forced;

  detail::Attempt<K> at = engine.run(params, forced);
  int resolutions = 0;
  std::mt19937 rng(opts.rng_seed);

  while (!at.ok && at.failed_root >= 0 && engine.is_root(at.failed_root) &&
         resolutions < opts.max_resolutions) {
    // Earlier slots whose parameters the user did not pin are searchable.
    std::vector<std::pair<long, int>> coords;  // (coefficient index, coordinate)
    for (const FreeSlot<K>& slot : at.slots) {
      if (slot.root >= at.failed_root) continue;
      if (opts.free_parameters.count(slot.coeff_index)) continue;
      for (std::size_t s = 0; s < slot.directions.size(); ++s)
        coords.emplace_back(slot.coeff_index, static_cast<int>(s));
    }
    if (coords.empty()) break;

    auto gap_at = [&](const std::vector<K>& assignment) -> std::optional<std::vector<K>> {
      std::map<long, std::vector<K>> trial = params;
      for (std::size_t i = 0; i < coords.size(); ++i) {
        auto [idx, s] = coords[i];
        auto& vec = trial[idx];
        if (static_cast<int>(vec.size()) <= s) vec.resize(s + 1, field_traits<K>::zero());
        vec[s] = assignment[i];
      }
      return engine.membership_gap(trial, forced, at.failed_root);
    };

    std::vector<K> origin(coords.size(), field_traits<K>::zero());
    for (std::size_t i = 0; i < coords.size(); ++i) {
      auto [idx, s] = coords[i];
      auto it = params.find(idx);
      if (it != params.end() && s < static_cast<int>(it->second.size()))
        origin[i] = it->second[s];
    }
    auto gap0 = gap_at(origin);
    if (!gap0) break;
    const std::size_t gap_dim = gap0->size();

    // Collinearity probe: second differences of the gap along every searchable
    // coordinate vanish iff the dependence is affine (to probe resolution).
    bool affine = true;
    Matrix<K> jac(static_cast<int>(gap_dim), static_cast<int>(coords.size()));
    const double probe_scale = std::max(1.0, detail::vec_magnitude(*gap0));
    for (std::size_t i = 0; i < coords.size() && affine; ++i) {
      std::vector<K> p1 = origin, p2 = origin;
      p1[i] = p1[i] + field_traits<K>::one();
      p2[i] = p2[i] + field_traits<K>::from_int(2);
      auto g1 = gap_at(p1), g2 = gap_at(p2);
      if (!g1 || !g2) {
        affine = false;
        break;
      }
      for (std::size_t row = 0; row < gap_dim; ++row) {
        K second = (*g2)[row] - (*g1)[row] - (*g1)[row] + (*gap0)[row];
        if (!is_zero(second, problem.tol, probe_scale)) affine = false;
        jac(static_cast<int>(row), static_cast<int>(i)) = (*g1)[row] - (*gap0)[row];
      }
    }

    bool resolved = false;
    std::vector<K> solution;
    if (affine && gap_dim > 0) {
      LinearSolve<K> sol = solve_linear(jac, detail::negate(*gap0), problem.tol);
      if (sol.feasible) {
        solution = origin;
        for (std::size_t i = 0; i < coords.size(); ++i)
          solution[i] = solution[i] + sol.particular[i];
        auto check = gap_at(solution);
        resolved = check && is_zero_gap(*check, problem.tol, probe_scale);
      }
    }
    if (!resolved) {
      // Bounded sampling over small integer grids, then (inexact modes) a
      // finite-difference Newton polish from the best grid point.
      long range = opts.search_range;
      long per_dim = 2 * range + 1;
      double combos = 1.0;
      for (std::size_t i = 0; i < coords.size(); ++i) combos *= static_cast<double>(per_dim);
      long budget = opts.search_budget;
      std::vector<K> best;
      double best_mag = -1.0;
      auto consider = [&](const std::vector<K>& cand) {
        auto g = gap_at(cand);
        if (!g) return;
        double mag = detail::vec_magnitude(*g);
        if (best_mag < 0 || mag < best_mag) {
          best_mag = mag;
          best = cand;
        }
      };
      if (combos <= static_cast<double>(budget)) {
        std::vector<long> counter(coords.size(), -range);
        while (true) {
          std::vector<K> cand(coords.size());
          for (std::size_t i = 0; i < coords.size(); ++i)
            cand[i] = field_traits<K>::from_int(counter[i]);
          consider(cand);
          std::size_t pos = 0;
          while (pos < counter.size() && ++counter[pos] > range) {
            counter[pos] = -range;
            ++pos;
          }
          if (pos == counter.size()) break;
        }
      } else {
        std::uniform_int_distribution<long> dist(-range, range);
        for (long trial = 0; trial < budget; ++trial) {
          std::vector<K> cand(coords.size());
          for (std::size_t i = 0; i < coords.size(); ++i)
            cand[i] = field_traits<K>::from_int(dist(rng));
          consider(cand);
        }
      }
      if (best_mag >= 0) {
        if constexpr (!field_traits<K>::is_exact) {
          // local FD Newton refinement
          std::vector<K> x = best;
          for (int it = 0; it < 25 && best_mag > problem.tol.threshold(probe_scale); ++it) {
            auto gx = gap_at(x);
            if (!gx) break;
            Matrix<K> fd(static_cast<int>(gap_dim), static_cast<int>(coords.size()));
            const double h = 1e-6;
            for (std::size_t i = 0; i < coords.size(); ++i) {
              std::vector<K> xp = x;
              xp[i] = xp[i] + K(h);
              auto gp = gap_at(xp);
              if (!gp) break;
              for (std::size_t row = 0; row < gap_dim; ++row)
                fd(static_cast<int>(row), static_cast<int>(i)) = ((*gp)[row] - (*gx)[row]) / K(h);
            }
            LinearSolve<K> step = solve_linear(fd, detail::negate(*gx), problem.tol);
            if (!step.feasible) break;
            for (std::size_t i = 0; i < coords.size(); ++i) x[i] = x[i] + step.particular[i];
            auto gn = gap_at(x);
            if (!gn) break;
            double mag = detail::vec_magnitude(*gn);
            if (mag >= best_mag) break;
            best_mag = mag;
            best = x;
          }
        }
        auto g = gap_at(best);
        if (g && is_zero_gap(*g, problem.tol, probe_scale)) {
          solution = best;
          resolved = true;
        }
      }
    }

    if (!resolved) break;
    for (std::size_t i = 0; i < coords.size(); ++i) {
      auto [idx, s] = coords[i];
      auto& vec = params[idx];
      if (static_cast<int>(vec.size()) <= s) vec.resize(s + 1, field_traits<K>::zero());
      vec[s] = solution[i];
      forced[idx] = true;
    }
    ++resolutions;
    at = engine.run(params, forced);
  }

  if (!at.ok) {
    out.status = engine.is_root(at.failed_root) ? SolveStatus::InfeasibleRoot
                                                : SolveStatus::NumericalBreakdown;
    out.message = at.message;
    out.failed_root = at.failed_root;
    out.witness = at.witness;
    return out;
  }

  // Freedom audit: a parameter introduced at an earlier root is only free if
  // later range conditions stay satisfiable as it varies. The consumed
  // dimension is the rank of the stacked (probed) dependence of all later
  // membership gaps on the earlier parameters; nonaffine dependence counts
  // its coordinates as consumed outright.
  int total_dims = 0;
  for (const FreeSlot<K>& slot : at.slots) total_dims += static_cast<int>(slot.directions.size());
  int consumed_dims = 0;
  std::vector<std::pair<long, int>> all_coords;
  std::vector<long> coord_root;
  std::vector<bool> coord_supplied;
  for (const FreeSlot<K>& slot : at.slots) {
    const bool supplied = opts.free_parameters.count(slot.coeff_index) != 0;
    for (std::size_t s = 0; s < slot.directions.size(); ++s) {
      all_coords.emplace_back(slot.coeff_index, static_cast<int>(s));
      coord_root.push_back(slot.root);
      coord_supplied.push_back(supplied);
    }
  }
  std::set<long> forced_slot_indices;
  for (const auto& [idx, was] : forced)
    if (was) forced_slot_indices.insert(idx);
  if (!all_coords.empty()) {
    auto gap_for = [&](long root, const std::vector<K>& assignment)
        -> std::optional<std::vector<K>> {
      std::map<long, std::vector<K>> trial = params;
      for (std::size_t i = 0; i < all_coords.size(); ++i) {
        auto [idx, s] = all_coords[i];
        auto& vec = trial[idx];
        if (static_cast<int>(vec.size()) <= s) vec.resize(s + 1, field_traits<K>::zero());
        vec[s] = assignment[i];
      }
      return engine.membership_gap(trial, forced, root);
    };
    std::vector<K> origin(all_coords.size(), field_traits<K>::zero());
    for (std::size_t i = 0; i < all_coords.size(); ++i) {
      auto [idx, s] = all_coords[i];
      auto it = params.find(idx);
      if (it != params.end() && s < static_cast<int>(it->second.size()))
        origin[i] = it->second[s];
    }
    std::vector<std::vector<K>> stacked;  // affine dependence rows over coords
    std::vector<bool> nonaffine_consumed(all_coords.size(), false);
    for (const FreeSlot<K>& slot : at.slots) {
      const long root = slot.root;
      bool has_earlier = false;
      for (long cr : coord_root)
        if (cr < root) has_earlier = true;
      if (!has_earlier) continue;
      auto gap0 = gap_for(root, origin);
      if (!gap0 || gap0->empty()) continue;
      const std::size_t gap_dim = gap0->size();
      const double probe_scale = std::max(1.0, detail::vec_magnitude(*gap0));
      std::vector<std::vector<K>> rows(gap_dim,
                                       std::vector<K>(all_coords.size(), field_traits<K>::zero()));
      for (std::size_t i = 0; i < all_coords.size(); ++i) {
        if (coord_root[i] >= root) continue;  // later parameters cannot reach this root
        std::vector<K> p1 = origin, p2 = origin;
        p1[i] = p1[i] + field_traits<K>::one();
        p2[i] = p2[i] + field_traits<K>::from_int(2);
        auto g1 = gap_for(root, p1), g2 = gap_for(root, p2);
        if (!g1 || !g2) {
          nonaffine_consumed[i] = true;
          continue;
        }
        bool affine = true, varies = false;
        for (std::size_t row = 0; row < gap_dim; ++row) {
          K second = (*g2)[row] - (*g1)[row] - (*g1)[row] + (*gap0)[row];
          if (!is_zero(second, problem.tol, probe_scale)) affine = false;
          K first = (*g1)[row] - (*gap0)[row];
          if (!is_zero(first, problem.tol, probe_scale)) varies = true;
          rows[row][i] = first;
        }
        if (!affine && varies) nonaffine_consumed[i] = true;
      }
      for (auto& row : rows) stacked.push_back(std::move(row));
    }
    std::vector<int> affine_cols;
    for (std::size_t i = 0; i < all_coords.size(); ++i)
      if (!nonaffine_consumed[i])
        affine_cols.push_back(static_cast<int>(i));
      else
        ++consumed_dims;
    if (!stacked.empty() && !affine_cols.empty()) {
      Matrix<K> dep(static_cast<int>(stacked.size()), static_cast<int>(affine_cols.size()));
      for (std::size_t r = 0; r < stacked.size(); ++r)
        for (std::size_t c = 0; c < affine_cols.size(); ++c)
          dep(static_cast<int>(r), static_cast<int>(c)) = stacked[r][affine_cols[c]];
      LinearSolve<K> dep_sol = solve_linear(
          dep, std::vector<K>(dep.rows(), field_traits<K>::zero()), problem.tol);
      consumed_dims += dep_sol.rank;
      for (int pc : dep_sol.pivot_columns)
        if (!coord_supplied[affine_cols[pc]])
          forced_slot_indices.insert(all_coords[affine_cols[pc]].first);
    }
    for (std::size_t i = 0; i < all_coords.size(); ++i)
      if (nonaffine_consumed[i] && !coord_supplied[i])
        forced_slot_indices.insert(all_coords[i].first);
  }

  SolutionFamily<K> fam;
  fam.m = opts.m;
  fam.n = base.n;
  fam.d = base.d;
  fam.r = problem.num_eqs_r;
  fam.order = opts.order;
  fam.coefficients = std::move(at.table);
  fam.free_slots = std::move(at.slots);
  fam.solvability = std::move(at.solvability);
  for (auto& rec : fam.solvability) rec.forced_earlier_parameters = resolutions > 0;
  for (auto& slot : fam.free_slots)
    if (forced_slot_indices.count(slot.coeff_index)) slot.parameters_forced = true;
  fam.mid_band_lo = opts.m + base.n + 1;
  fam.mid_band_hi = 2 * opts.m + base.n;
  fam.scalar_route = sys.scalar_route;
  fam.per_order_free_dims = problem.dim_d - problem.num_eqs_r;
  fam.family_dimension = std::max(0, total_dims - consumed_dims);
  fam.certificate = residual_certificate(problem, fam.coefficients, base.n, opts.order);
  out.family = std::move(fam);
  return out;
}

// Re-runs the continuation at randomized free-parameter draws and checks the
// residual certificate of every member table.
template <class K>
ResidualCertificate<K> verify_family(const Problem& problem, const JetPoint<K>& base,
                                     const SolveOptions<K>& opts, const SolutionFamily<K>& fam,
                                     int check_order, int samples, unsigned seed = 7) {
  ResidualCertificate<K> worst = residual_certificate(problem, fam.coefficients, fam.n, check_order);
  worst.samples = 1;
  std::mt19937 rng(seed);
  std::uniform_int_distribution<long> dist(-3, 3);
  for (int s = 0; s < samples; ++s) {
    SolveOptions<K> member_opts = opts;
    for (const FreeSlot<K>& slot : fam.free_slots) {
      if (slot.parameters_supplied || slot.parameters_forced) continue;
      std::vector<K> coords;
      for (std::size_t i = 0; i < slot.directions.size(); ++i)
        coords.push_back(field_traits<K>::from_int(dist(rng)));
      member_opts.free_parameters[slot.coeff_index] = coords;
    }
    SolveOutcome<K> member = fam.regular_extension ? solve_regular(problem, base, member_opts)
                                                   : solve(problem, base, member_opts);
    if (!member.ok()) {
      worst.pass = false;
      continue;
    }
    ResidualCertificate<K> cert =
        residual_certificate(problem, member.family->coefficients, fam.n, check_order);
    worst.samples += 1;
    worst.max_residual = std::max(worst.max_residual, cert.max_residual);
    if (!cert.pass) {
      worst.pass = false;
      if (worst.first_failing_order < 0) worst.first_failing_order = cert.first_failing_order;
    }
  }
  return worst;
}

}  // namespace fps

#endif
