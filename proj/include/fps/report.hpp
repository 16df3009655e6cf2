#ifndef FPS_REPORT_HPP
#define FPS_REPORT_HPP

#include <string>

#include <json.hpp>

#include "fps/indicial.hpp"
#include "fps/oracle.hpp"
#include "fps/perturbation.hpp"
#include "fps/solver.hpp"
#include "fps/tougeron.hpp"

namespace fps {

// Reports use insertion-ordered JSON so identical inputs serialize to
// byte-identical output. Exact scalars serialize as "p/q" strings, floats as
// shortest round-trip numbers, complex values as [re, im].
using Report = nlohmann::ordered_json;

inline Report scalar_json(const Rational& q) { return Report(q.get_str()); }
inline Report scalar_json(double v) { return Report(v == 0.0 ? 0.0 : v); }
inline Report scalar_json(const std::complex<double>& v) {
  return Report::array({v.real() == 0.0 ? 0.0 : v.real(), v.imag() == 0.0 ? 0.0 : v.imag()});
}

template <class K>
Report vector_json(const std::vector<K>& v) {
  Report arr = Report::array();
  for (const K& x : v) arr.push_back(scalar_json(x));
  return arr;
}

template <class K>
Report matrix_json(const Matrix<K>& m) {
  Report rows = Report::array();
  for (int i = 0; i < m.rows(); ++i) {
    Report row = Report::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(scalar_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <class K>
Report poly_json(const Poly<K>& p) {
  Report arr = Report::array();
  for (const K& c : p.coeffs()) arr.push_back(scalar_json(c));
  return arr;
}

template <class K>
Report conditions_json(const ConditionReport<K>& rep) {
  Report j;
  j["m"] = rep.m;
  j["base_point_is_root"] = rep.base_point_is_root;
  j["lower_separant_zero"] = rep.prev_separant_zero;
  j["separant_nonzero"] = rep.separant_nonzero;
  j["remainders_zero"] = rep.remainders_zero;
  j["ok"] = rep.all_ok();
  Report witnesses = Report::array();
  for (const auto& w : rep.witnesses) {
    Report item;
    item["what"] = w.description;
    item["magnitude"] = w.magnitude;
    witnesses.push_back(std::move(item));
  }
  j["witnesses"] = std::move(witnesses);
  if (rep.s_prev) j["separant_below"] = matrix_json(rep.s_prev->full);
  j["separant_at_m"] = matrix_json(rep.s_cur.full);
  return j;
}

template <class K>
Report indicial_json(const IndicialSystem<K>& sys) {
  Report j;
  j["route"] = sys.scalar_route ? "scalar" : "system";
  j["identically_zero"] = sys.identically_zero;
  if (sys.r == sys.d) {
    j["g"] = poly_json(sys.g);
    j["degree"] = sys.g.degree();
  } else {
    Report minors = Report::array();
    for (const auto& minor : sys.minors) minors.push_back(poly_json(minor));
    j["minors"] = std::move(minors);
  }
  j["roots"] = sys.roots;
  j["borderline_roots"] = sys.borderline_roots;
  j["root_bound"] = sys.root_bound;
  j["scan_truncated"] = sys.scan_truncated;
  return j;
}

template <class K>
Report certificate_json(const ResidualCertificate<K>& cert) {
  Report j;
  j["checked_order"] = cert.checked_order;
  j["samples"] = cert.samples;
  j["pass"] = cert.pass;
  j["max_residual"] = cert.max_residual;
  j["first_failing_order"] = cert.first_failing_order;
  return j;
}

template <class K>
Report family_json(const SolutionFamily<K>& fam) {
  Report j;
  j["order"] = fam.order;
  j["route"] = fam.scalar_route ? "scalar" : "system";
  j["regular_extension"] = fam.regular_extension;
  Report coeffs = Report::array();
  for (const auto& c : fam.coefficients) coeffs.push_back(vector_json(c));
  j["coefficients"] = std::move(coeffs);
  Report slots = Report::array();
  for (const auto& slot : fam.free_slots) {
    Report s;
    s["root"] = slot.root;
    s["index"] = slot.coeff_index;
    s["offset"] = vector_json(slot.offset);
    Report dirs = Report::array();
    for (const auto& dir : slot.directions) dirs.push_back(vector_json(dir));
    s["directions"] = std::move(dirs);
    s["parameters"] = vector_json(slot.parameters);
    s["supplied"] = slot.parameters_supplied;
    s["forced"] = slot.parameters_forced;
    slots.push_back(std::move(s));
  }
  j["free_slots"] = std::move(slots);
  Report solv = Report::array();
  for (const auto& rec : fam.solvability) {
    Report s;
    s["root"] = rec.root;
    s["feasible"] = rec.feasible;
    s["residual"] = rec.residual;
    s["forced_earlier_parameters"] = rec.forced_earlier_parameters;
    solv.push_back(std::move(s));
  }
  j["solvability"] = std::move(solv);
  j["family_dimension"] = fam.family_dimension;
  j["mid_band"] = Report::array({fam.mid_band_lo, fam.mid_band_hi});
  j["per_order_free_dims"] = fam.per_order_free_dims;
  j["certificate"] = certificate_json(fam.certificate);
  return j;
}

template <class K>
Report outcome_json(const SolveOutcome<K>& out) {
  Report j;
  j["status"] = solve_status_name(out.status);
  j["message"] = out.message;
  if (out.failed_root >= 0) j["failed_root"] = out.failed_root;
  if (out.witness != 0.0) j["witness"] = out.witness;
  if (out.conditions) j["conditions"] = conditions_json(*out.conditions);
  if (out.indicial) j["indicial"] = indicial_json(*out.indicial);
  if (out.family) j["solution"] = family_json(*out.family);
  return j;
}

template <class K>
Report oracle_json(const OracleResult<K>& res) {
  Report j;
  j["feasible"] = res.feasible;
  if (!res.feasible) {
    j["failure_order"] = res.failure_order;
    j["failure_magnitude"] = res.failure_magnitude;
    j["note"] = res.note;
  }
  Report coeffs = Report::array();
  for (const auto& c : res.coefficients) coeffs.push_back(vector_json(c));
  j["coefficients"] = std::move(coeffs);
  j["free_indices"] = res.free_indices;
  return j;
}

inline Report continuation_json(const ContinuationResult& res) {
  Report j;
  j["limit_value"] = vector_json(res.limit_value);
  Report samples = Report::array();
  for (const auto& s : res.samples) {
    Report item;
    item["x"] = s.x;
    item["value"] = vector_json(s.value);
    item["scaled_residual"] = s.scaled_residual;
    item["unscaled_residual"] = s.unscaled_residual;
    item["newton_iterations"] = s.newton_iterations;
    item["converged"] = s.converged;
    item["outside_radius"] = s.outside_radius;
    samples.push_back(std::move(item));
  }
  j["samples"] = std::move(samples);
  return j;
}

inline Report diagnostic_json(const OrderDiagnostic& diag) {
  Report j;
  j["det_vanishing_order"] = diag.det_vanishing_order;
  j["residual_vanishing_order"] = diag.residual_vanishing_order;
  j["order_available"] = diag.order_available;
  j["order_required"] = diag.order_required;
  j["classical_tougeron_applies"] = diag.classical_applies;
  j["leading_coefficient"] = diag.leading_coefficient;
  return j;
}

template <class K>
Report perturbation_json(const PerturbationReport<K>& rep) {
  Report j;
  j["m"] = rep.m;
  j["required_order"] = rep.required_order;
  j["order_ok"] = rep.order_ok;
  if (!rep.order_ok) j["order_witness"] = rep.order_witness;
  j["invariants_checked"] = rep.invariants_checked;
  j["invariants_equal"] = rep.invariants_equal;
  j["mismatches"] = rep.mismatches;
  j["base_status"] = solve_status_name(rep.base_status);
  j["perturbed_status"] = solve_status_name(rep.perturbed_status);
  j["first_divergent_index"] = rep.first_divergent_index;
  j["divergence_magnitude"] = rep.divergence_magnitude;
  return j;
}

}  // namespace fps

#endif
