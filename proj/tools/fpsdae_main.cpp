// fpsdae: truncated power series solutions of nonlinear DAE systems.
//
// Subcommands: analyze (degeneracy hypotheses + indicial data), solve
// (coefficient recursion with free slots at integer roots), verify (residual
// certificate of a solve output), oracle (independent undetermined-coefficients
// solve, optional diff), tougeron (algebraic-case continuation + order
// diagnostic), stability (invariance under high-order perturbations).

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "fps/problemfile.hpp"
#include "fps/report.hpp"

namespace {

using namespace fps;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitSchema = 3;
constexpr int kExitHypothesis = 4;
constexpr int kExitInfeasibleRoot = 5;

int exit_code_for(SolveStatus status) {
  switch (status) {
    case SolveStatus::Ok: return kExitOk;
    case SolveStatus::InfeasibleRoot: return kExitInfeasibleRoot;
    case SolveStatus::HypothesisFailure:
    case SolveStatus::SingularLeadingBlock:
    case SolveStatus::Overdetermined:
    case SolveStatus::IndicialIdenticallyZero: return kExitHypothesis;
    case SolveStatus::NumericalBreakdown: return kExitInternal;
  }
  return kExitInternal;
}

struct OutputOptions {
  std::string emit = "json";
  std::string out_path;
};

void emit_report(const Report& report, const OutputOptions& out) {
  std::string text;
  if (out.emit == "json") {
    text = report.dump(2);
    text.push_back('\n');
  } else {
    std::ostringstream os;
    os << "fpsdae " << report.value("command", "?") << " report\n";
    for (const auto& [key, value] : report.items()) {
      if (key == "command" || key == "tool" || key == "schema_version") continue;
      os << "  " << key << ": " << value.dump() << "\n";
    }
    text = os.str();
  }
  if (!out.out_path.empty()) {
    std::ofstream f(out.out_path);
    if (!f) throw schema_error("cannot write output file: " + out.out_path);
    f << text;
  }
  std::cout << text;
}

Report report_header(const char* command, const ProblemFile& pf) {
  Report j;
  j["schema_version"] = 1;
  j["tool"] = "fpsdae";
  j["command"] = command;
  j["field"] = pf.field;
  j["n"] = pf.n;
  j["d"] = pf.d;
  j["r"] = pf.r;
  Report eqs = Report::array();
  for (const auto& e : pf.equations) eqs.push_back(e);
  j["equations"] = std::move(eqs);
  return j;
}

template <class Fn>
int with_field(FieldMode mode, Fn&& fn) {
  switch (mode) {
    case FieldMode::Real64: return fn.template operator()<double>();
    case FieldMode::Complex64: return fn.template operator()<std::complex<double>>();
    case FieldMode::RationalExact: return fn.template operator()<Rational>();
  }
  return kExitInternal;
}

std::map<long, std::vector<std::string>> parse_free_flags(const std::vector<std::string>& flags) {
  std::map<long, std::vector<std::string>> out;
  for (const auto& flag : flags) {
    auto eq = flag.find('=');
    if (eq == std::string::npos)
      throw usage_error("--free expects index=value[,value...], got '" + flag + "'");
    long idx = std::stol(flag.substr(0, eq));
    std::vector<std::string> values;
    std::stringstream ss(flag.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(item);
    if (values.empty()) throw usage_error("--free needs at least one value");
    out[idx] = std::move(values);
  }
  return out;
}

template <class K>
SolveOptions<K> solve_options(const ProblemFile& pf, bool scalar_route = false) {
  SolveOptions<K> opts;
  opts.m = pf.m;
  opts.order = pf.order;
  opts.scalar_route = scalar_route;
  opts.free_parameters = build_free_parameters<K>(pf);
  opts.rng_seed = pf.seed;
  return opts;
}

int cmd_analyze(const ProblemFile& pf, const OutputOptions& out) {
  return with_field(pf.field_mode(), [&]<class K>() {
    Problem problem = build_problem(pf);
    JetPoint<K> base = build_base_point<K>(pf);
    Report report = report_header("analyze", pf);

    int exit_code = kExitOk;
    if (pf.scan_m) {
      Report scans = Report::array();
      bool any_ok = false;
      for (int m = std::max(1, pf.scan_m->first); m <= pf.scan_m->second; ++m) {
        auto rep = check_conditions(problem, base, m);
        Report entry;
        entry["m"] = m;
        entry["ok"] = rep.all_ok();
        entry["first_failure"] = rep.first_failure();
        if (rep.all_ok()) {
          any_ok = true;
          auto sys = assemble_indicial(problem, base, m, rep);
          entry["indicial"] = indicial_json(sys);
        }
        scans.push_back(std::move(entry));
      }
      report["scan"] = std::move(scans);
      if (!any_ok) exit_code = kExitHypothesis;
    } else {
      report["m"] = pf.m;
      auto rep = check_conditions(problem, base, pf.m);
      report["conditions"] = conditions_json(rep);
      if (rep.all_ok()) {
        auto sys = assemble_indicial(problem, base, pf.m, rep);
        report["indicial"] = indicial_json(sys);
      } else {
        exit_code = kExitHypothesis;
      }
    }
    emit_report(report, out);
    return exit_code;
  });
}

int cmd_solve(const ProblemFile& pf, bool scalar_route, const OutputOptions& out) {
  return with_field(pf.field_mode(), [&]<class K>() {
    Problem problem = build_problem(pf);
    JetPoint<K> base = build_base_point<K>(pf);
    SolveOptions<K> opts = solve_options<K>(pf, scalar_route);
    SolveOutcome<K> outcome = solve(problem, base, opts);
    Report report = report_header("solve", pf);
    report["m"] = pf.m;
    report["order"] = pf.order;
    report.update(outcome_json(outcome));
    emit_report(report, out);
    return exit_code_for(outcome.status);
  });
}

int cmd_verify(const ProblemFile& pf, const std::string& solution_path, int check_order,
               int sample_count, const OutputOptions& out) {
  return with_field(pf.field_mode(), [&]<class K>() {
    Problem problem = build_problem(pf);
    JetPoint<K> base = build_base_point<K>(pf);
    Report report = report_header("verify", pf);
    int nchk = check_order > 0 ? check_order : pf.order;
    if (!solution_path.empty()) {
      std::ifstream in(solution_path);
      if (!in) throw schema_error("cannot open solution file: " + solution_path);
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::parse_error& e) {
        throw schema_error(std::string("solution file is not valid JSON: ") + e.what());
      }
      if (!j.contains("solution") || !j.at("solution").contains("coefficients"))
        throw schema_error("solution file carries no coefficient table");
      std::vector<std::vector<K>> table;
      for (const auto& row : j.at("solution").at("coefficients")) {
        std::vector<K> v;
        for (const auto& entry : row) {
          if constexpr (std::is_same_v<K, Rational>) {
            v.push_back(rational_from_string(entry.template get<std::string>()));
          } else if constexpr (std::is_same_v<K, double>) {
            v.push_back(entry.template get<double>());
          } else {
            v.push_back(K(entry[0].template get<double>(), entry[1].template get<double>()));
          }
        }
        table.push_back(std::move(v));
      }
      int max_checkable = static_cast<int>(table.size()) - 1 - pf.n;
      nchk = std::min(nchk, max_checkable);
      auto cert = residual_certificate(problem, table, pf.n, nchk);
      report["certificate"] = certificate_json(cert);
      emit_report(report, out);
      return kExitOk;
    }
    SolveOptions<K> opts = solve_options<K>(pf);
    SolveOutcome<K> outcome = solve(problem, base, opts);
    if (!outcome.ok()) {
      report["status"] = solve_status_name(outcome.status);
      report["message"] = outcome.message;
      emit_report(report, out);
      return exit_code_for(outcome.status);
    }
    auto cert = verify_family(problem, base, opts, *outcome.family, nchk, sample_count, pf.seed);
    report["certificate"] = certificate_json(cert);
    emit_report(report, out);
    return kExitOk;
  });
}

int cmd_oracle(const ProblemFile& pf, const std::string& diff_path, const OutputOptions& out) {
  return with_field(pf.field_mode(), [&]<class K>() {
    Problem problem = build_problem(pf);
    JetPoint<K> base = build_base_point<K>(pf);
    auto res = brute_force_solve(problem, base.coeffs, pf.order + pf.n,
                                 build_free_parameters<K>(pf));
    Report report = report_header("oracle", pf);
    report["order"] = pf.order;
    report["oracle"] = oracle_json(res);
    int exit_code = res.feasible ? kExitOk : kExitInfeasibleRoot;
    if (!diff_path.empty() && res.feasible) {
      std::ifstream in(diff_path);
      if (!in) throw schema_error("cannot open solve output: " + diff_path);
      nlohmann::json j;
      in >> j;
      if (!j.contains("solution") || !j.at("solution").contains("coefficients"))
        throw schema_error("solve output carries no coefficient table");
      double max_delta = 0.0;
      long at_index = -1;
      const auto& rows = j.at("solution").at("coefficients");
      for (std::size_t i = 0; i < rows.size() && i < res.coefficients.size(); ++i) {
        for (int c = 0; c < pf.d && c < static_cast<int>(rows[i].size()); ++c) {
          K other;
          if constexpr (std::is_same_v<K, Rational>) {
            other = rational_from_string(rows[i][c].template get<std::string>());
          } else if constexpr (std::is_same_v<K, double>) {
            other = rows[i][c].template get<double>();
          } else {
            other = K(rows[i][c][0].template get<double>(), rows[i][c][1].template get<double>());
          }
          double delta = magnitude(static_cast<K>(res.coefficients[i][c] - other));
          if (delta > max_delta) {
            max_delta = delta;
            at_index = static_cast<long>(i);
          }
        }
      }
      Report diff;
      diff["max_abs_delta"] = max_delta;
      diff["at_index"] = at_index;
      report["diff"] = std::move(diff);
    }
    emit_report(report, out);
    return exit_code;
  });
}

int cmd_tougeron(const ProblemFile& pf, const OutputOptions& out) {
  if (pf.field_mode() != FieldMode::Real64)
    throw usage_error("the tougeron command requires field \"f64\"");
  Problem problem = build_problem(pf);
  JetPoint<double> base = build_base_point<double>(pf);
  Report report = report_header("tougeron", pf);
  report["m"] = pf.m;
  auto hyp = tougeron_hypotheses(problem, base, pf.m);
  Report hj;
  hj["base_point_is_root"] = hyp.base_point_is_root;
  hj["lower_blocks_zero"] = hyp.lower_blocks_zero;
  hj["lead_block_invertible"] = hyp.lead_block_invertible;
  hj["remainders_zero"] = hyp.remainders_zero;
  hj["ok"] = hyp.all_ok();
  report["hypotheses"] = std::move(hj);
  if (!hyp.all_ok()) {
    emit_report(report, out);
    return kExitHypothesis;
  }
  auto res = continue_correction(problem, base, pf.m, pf.samples);
  report["continuation"] = continuation_json(res);
  report["diagnostic"] = diagnostic_json(tougeron_diagnostic(problem, base, pf.m));
  emit_report(report, out);
  return kExitOk;
}

int cmd_stability(const ProblemFile& pf, const std::vector<std::string>& perturb_flags,
                  const OutputOptions& out) {
  return with_field(pf.field_mode(), [&]<class K>() {
    Problem problem = build_problem(pf);
    JetPoint<K> base = build_base_point<K>(pf);
    std::vector<std::string> sources = perturb_flags.empty() ? pf.perturbation : perturb_flags;
    if (static_cast<int>(sources.size()) != pf.r)
      throw usage_error("stability needs one perturbation expression per equation");
    std::vector<ExprPtr> perturbation;
    for (const auto& src : sources) perturbation.push_back(parse_expression(src));
    SolveOptions<K> opts = solve_options<K>(pf);
    auto rep = perturbation_check(problem, base, pf.m, perturbation, opts);
    Report report = report_header("stability", pf);
    report["m"] = pf.m;
    report["result"] = perturbation_json(rep);
    emit_report(report, out);
    return rep.order_ok ? kExitOk : kExitUsage;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truncated power series solutions of nonlinear DAE systems"};
  app.require_subcommand(1);

  std::string file, out_path, emit = "json", solution_path, diff_path;
  std::vector<std::string> free_flags, perturb_flags, sample_flags;
  int order_override = -1, m_override = -1, check_order = -1, sample_count = 3;
  bool scalar_route = false;
  std::string scan_range;

  double atol_override = -1.0, rtol_override = -1.0;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("file", file, "problem file (JSON)")->required();
    cmd->add_option("--emit", emit, "output format: json or text")
        ->check(CLI::IsMember({"json", "text"}));
    cmd->add_option("-o,--output", out_path, "also write the report to this path");
    cmd->add_option("--m", m_override, "degeneracy level override");
    cmd->add_option("--order", order_override, "series order override");
    cmd->add_option("--atol", atol_override, "absolute zero-test tolerance");
    cmd->add_option("--rtol", rtol_override, "relative zero-test tolerance");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "check hypotheses and indicial data");
  add_common(analyze);
  analyze->add_option("--scan-m", scan_range, "scan degeneracy levels, e.g. 1..3");

  CLI::App* solve_cmd = app.add_subcommand("solve", "run the coefficient recursion");
  add_common(solve_cmd);
  solve_cmd->add_option("--free", free_flags, "free parameter, index=value[,value...]");
  solve_cmd->add_flag("--scalar-route", scalar_route,
                      "use the scalar division recursion (d = r = 1)");

  CLI::App* verify = app.add_subcommand("verify", "residual certificate of a solution");
  add_common(verify);
  verify->add_option("--solution", solution_path, "solve output to verify");
  verify->add_option("--check-order", check_order, "highest order to check");
  verify->add_option("--samples-count", sample_count, "randomized family members to check");

  CLI::App* oracle_cmd = app.add_subcommand("oracle", "brute-force undetermined coefficients");
  add_common(oracle_cmd);
  oracle_cmd->add_option("--free", free_flags, "free parameter, index=value[,value...]");
  oracle_cmd->add_option("--diff", diff_path, "diff against a prior solve output");

  CLI::App* tougeron_cmd =
      app.add_subcommand("tougeron", "algebraic-case continuation and order diagnostic");
  add_common(tougeron_cmd);
  tougeron_cmd->add_option("--samples", sample_flags, "continuation abscissas");

  CLI::App* stability = app.add_subcommand("stability", "high-order perturbation invariance");
  add_common(stability);
  stability->add_option("--perturb", perturb_flags, "perturbation expression (one per equation)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    ProblemFile pf = load_problem_file(file);
    apply_tolerance_environment(pf);
    if (atol_override >= 0.0) pf.atol = atol_override;
    if (rtol_override >= 0.0) pf.rtol = rtol_override;
    if (m_override >= 0) pf.m = m_override;
    if (order_override > 0) pf.order = order_override;
    for (auto& [idx, vals] : parse_free_flags(free_flags)) pf.free_parameters[idx] = vals;
    if (!sample_flags.empty()) {
      pf.samples.clear();
      for (const auto& s : sample_flags) pf.samples.push_back(std::stod(s));
    }
    if (!scan_range.empty()) {
      auto dots = scan_range.find("..");
      if (dots == std::string::npos) throw usage_error("--scan-m expects low..high");
      pf.scan_m = {std::stoi(scan_range.substr(0, dots)), std::stoi(scan_range.substr(dots + 2))};
    }
    OutputOptions out{emit, out_path};

    if (*analyze) return cmd_analyze(pf, out);
    if (*solve_cmd) {
      if (scalar_route && (pf.d != 1 || pf.r != 1))
        throw usage_error("--scalar-route requires d = r = 1");
      return cmd_solve(pf, scalar_route, out);
    }
    if (*verify) return cmd_verify(pf, solution_path, check_order, sample_count, out);
    if (*oracle_cmd) return cmd_oracle(pf, diff_path, out);
    if (*tougeron_cmd) return cmd_tougeron(pf, out);
    if (*stability) return cmd_stability(pf, perturb_flags, out);
    return kExitUsage;
  } catch (const schema_error& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const parse_error& e) {
    std::cerr << "expression error at " << e.line << ":" << e.col << ": " << e.what() << "\n";
    return kExitSchema;
  } catch (const validation_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const usage_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const hypothesis_error& e) {
    std::cerr << "hypothesis failure: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}
