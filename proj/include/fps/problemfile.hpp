#ifndef FPS_PROBLEMFILE_HPP
#define FPS_PROBLEMFILE_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fps/expansion.hpp"
#include "fps/expr.hpp"

namespace fps {

struct schema_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// On-disk problem description. Numeric data stays in exact string form here;
// conversion to a concrete field happens per command.
struct ProblemFile {
  int schema_version = 1;
  std::vector<std::string> equations;
  int n = 0;
  int d = 1;
  int r = 1;
  std::string field = "rational";
  std::vector<std::vector<std::string>> initial;  // c_0 .. c_{m+n}, each of size d
  int m = 1;
  std::optional<std::pair<int, int>> scan_m;
  int order = 8;
  double atol = 1e-12;
  double rtol = 1e-9;
  bool tolerances_set = false;
  std::map<long, std::vector<std::string>> free_parameters;
  std::vector<double> samples;  // continuation abscissas
  std::vector<std::string> perturbation;
  unsigned seed = 20240801;

  FieldMode field_mode() const;
};

ProblemFile load_problem_file(const std::string& path);

// Environment override FPSDAE_TOL="atol=..,rtol=.." applied below file-level
// settings.
void apply_tolerance_environment(ProblemFile& pf);

Problem build_problem(const ProblemFile& pf);

template <class K>
JetPoint<K> build_base_point(const ProblemFile& pf) {
  std::vector<std::vector<K>> coeffs;
  for (const auto& row : pf.initial) {
    std::vector<K> v;
    for (const auto& s : row) v.push_back(field_traits<K>::from_rational(rational_from_string(s)));
    coeffs.push_back(std::move(v));
  }
  return JetPoint<K>(pf.n, pf.d, std::move(coeffs));
}

template <class K>
std::map<long, std::vector<K>> build_free_parameters(const ProblemFile& pf) {
  std::map<long, std::vector<K>> out;
  for (const auto& [idx, vals] : pf.free_parameters) {
    std::vector<K> v;
    for (const auto& s : vals) v.push_back(field_traits<K>::from_rational(rational_from_string(s)));
    out[idx] = std::move(v);
  }
  return out;
}

}  // namespace fps

#endif
