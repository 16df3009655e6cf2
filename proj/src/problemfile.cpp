#include "fps/problemfile.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fps {

using nlohmann::json;

FieldMode ProblemFile::field_mode() const {
  if (field == "f64") return FieldMode::Real64;
  if (field == "c64") return FieldMode::Complex64;
  if (field == "rational") return FieldMode::RationalExact;
  throw schema_error("unknown field mode '" + field + "' (expected f64, c64, or rational)");
}

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

std::vector<std::string> string_vector(const json& j, const char* what) {
  std::vector<std::string> out;
  if (!j.is_array()) throw schema_error(std::string(what) + " must be an array");
  for (const auto& entry : j) {
    if (entry.is_string())
      out.push_back(entry.get<std::string>());
    else if (entry.is_number_integer())
      out.push_back(std::to_string(entry.get<long>()));
    else
      throw schema_error(std::string(what) + " entries must be strings or integers");
  }
  return out;
}

}  // namespace

ProblemFile load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw schema_error("cannot open problem file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw schema_error(std::string("problem file is not valid JSON: ") + e.what());
  }

  ProblemFile pf;
  pf.schema_version = get_or<int>(j, "schema_version", 1);
  if (pf.schema_version != 1) throw schema_error("unsupported schema_version");
  if (!j.contains("equations")) throw schema_error("missing 'equations'");
  for (const auto& eq : j.at("equations")) {
    if (!eq.is_string()) throw schema_error("'equations' entries must be strings");
    pf.equations.push_back(eq.get<std::string>());
  }
  pf.n = get_or<int>(j, "n", 0);
  pf.d = get_or<int>(j, "d", 1);
  pf.r = get_or<int>(j, "r", static_cast<int>(pf.equations.size()));
  if (pf.r != static_cast<int>(pf.equations.size()))
    throw schema_error("'r' does not match the number of equations");
  if (pf.n < 0 || pf.d < 1 || pf.r < 1) throw schema_error("need n >= 0, d >= 1, r >= 1");
  pf.field = get_or<std::string>(j, "field", "rational");
  pf.field_mode();  // validates

  if (j.contains("initial")) {
    for (const auto& row : j.at("initial")) {
      auto v = string_vector(row, "'initial' row");
      if (static_cast<int>(v.size()) != pf.d)
        throw schema_error("'initial' rows must have d entries");
      pf.initial.push_back(std::move(v));
    }
  }

  if (j.contains("m")) {
    const auto& m = j.at("m");
    if (m.is_number_integer()) {
      pf.m = m.get<int>();
    } else if (m.is_object() && m.contains("scan")) {
      auto range = m.at("scan");
      if (!range.is_array() || range.size() != 2)
        throw schema_error("'m.scan' must be [low, high]");
      pf.scan_m = {range[0].get<int>(), range[1].get<int>()};
      pf.m = pf.scan_m->first;
    } else {
      throw schema_error("'m' must be an integer or {\"scan\": [low, high]}");
    }
  }
  if (pf.m < 0) throw schema_error("'m' must be nonnegative");
  pf.order = get_or<int>(j, "order", 8);
  if (pf.order < 1) throw schema_error("'order' must be positive");

  if (j.contains("options")) {
    const auto& o = j.at("options");
    if (o.contains("atol") || o.contains("rtol")) {
      pf.atol = get_or<double>(o, "atol", pf.atol);
      pf.rtol = get_or<double>(o, "rtol", pf.rtol);
      pf.tolerances_set = true;
    }
    if (o.contains("free")) {
      for (const auto& [key, value] : o.at("free").items()) {
        long idx = std::stol(key);
        pf.free_parameters[idx] = string_vector(value, "'options.free' entry");
      }
    }
    if (o.contains("samples"))
      for (const auto& s : o.at("samples")) pf.samples.push_back(s.get<double>());
    if (o.contains("perturbation"))
      pf.perturbation = string_vector(o.at("perturbation"), "'options.perturbation'");
    pf.seed = get_or<unsigned>(o, "seed", pf.seed);
  }
  return pf;
}

void apply_tolerance_environment(ProblemFile& pf) {
  if (pf.tolerances_set) return;
  const char* env = std::getenv("FPSDAE_TOL");
  if (!env) return;
  std::stringstream ss(env);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) continue;
    std::string key = item.substr(0, eq);
    double value = std::stod(item.substr(eq + 1));
    if (key == "atol") pf.atol = value;
    if (key == "rtol") pf.rtol = value;
  }
}

Problem build_problem(const ProblemFile& pf) {
  Problem p;
  p.deriv_order_n = pf.n;
  p.dim_d = pf.d;
  p.num_eqs_r = pf.r;
  p.field = pf.field_mode();
  p.tol = Tolerance{pf.atol, pf.rtol};
  for (const auto& src : pf.equations) p.equations.push_back(parse_expression(src));
  validate_problem(p);
  return p;
}

}  // namespace fps
