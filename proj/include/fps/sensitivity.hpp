#ifndef FPS_SENSITIVITY_HPP
#define FPS_SENSITIVITY_HPP

#include <vector>

#include "fps/jet.hpp"

namespace fps {

// Jet augmented with first-order sensitivity channels. Channel i tracks the
// directional derivative of the base series with respect to one scalar input
// coordinate; every primitive propagates its exact linearization.
template <class K>
struct SensitivityJet {
  Jet<K> base;
  std::vector<Jet<K>> dirs;

  SensitivityJet() = default;
  SensitivityJet(Jet<K> b, std::size_t channels)
      : base(std::move(b)), dirs(channels, Jet<K>(base.order())) {}
  SensitivityJet(Jet<K> b, std::vector<Jet<K>> d) : base(std::move(b)), dirs(std::move(d)) {}

  int order() const { return base.order(); }
  std::size_t channels() const { return dirs.size(); }

  static void check_compatible(const SensitivityJet& a, const SensitivityJet& b) {
    if (a.channels() != b.channels()) throw usage_error("sensitivity channel count mismatch");
    Jet<K>::check_orders(a.base, b.base);
  }
};

template <class K>
SensitivityJet<K> operator+(const SensitivityJet<K>& a, const SensitivityJet<K>& b) {
  SensitivityJet<K>::check_compatible(a, b);
  SensitivityJet<K> r(a.base + b.base, a.channels());
  for (std::size_t k = 0; k < a.channels(); ++k) r.dirs[k] = a.dirs[k] + b.dirs[k];
  return r;
}

template <class K>
SensitivityJet<K> operator-(const SensitivityJet<K>& a, const SensitivityJet<K>& b) {
  SensitivityJet<K>::check_compatible(a, b);
  SensitivityJet<K> r(a.base - b.base, a.channels());
  for (std::size_t k = 0; k < a.channels(); ++k) r.dirs[k] = a.dirs[k] - b.dirs[k];
  return r;
}

template <class K>
SensitivityJet<K> operator-(const SensitivityJet<K>& a) {
  SensitivityJet<K> r(-a.base, a.channels());
  for (std::size_t k = 0; k < a.channels(); ++k) r.dirs[k] = -a.dirs[k];
  return r;
}

template <class K>
SensitivityJet<K> operator*(const SensitivityJet<K>& a, const SensitivityJet<K>& b) {
  SensitivityJet<K>::check_compatible(a, b);
  SensitivityJet<K> r(a.base * b.base, a.channels());
  for (std::size_t k = 0; k < a.channels(); ++k)
    r.dirs[k] = a.base * b.dirs[k] + b.base * a.dirs[k];
  return r;
}

template <class K>
SensitivityJet<K> sens_div(const SensitivityJet<K>& a, const SensitivityJet<K>& b) {
  SensitivityJet<K>::check_compatible(a, b);
  Jet<K> q = jet_div(a.base, b.base);
  SensitivityJet<K> r(q, a.channels());
  for (std::size_t k = 0; k < a.channels(); ++k)
    r.dirs[k] = jet_div(a.dirs[k] - q * b.dirs[k], b.base);
  return r;
}

template <class K>
SensitivityJet<K> sens_pow(const SensitivityJet<K>& a, unsigned exponent) {
  SensitivityJet<K> r(jet_pow(a.base, exponent), a.channels());
  if (exponent > 0) {
    Jet<K> deriv = field_traits<K>::from_int(static_cast<long>(exponent)) *
                   jet_pow(a.base, exponent - 1);
    for (std::size_t k = 0; k < a.channels(); ++k) r.dirs[k] = deriv * a.dirs[k];
  }
  return r;
}

template <class K>
SensitivityJet<K> sens_analytic(AnalyticFn fn, const SensitivityJet<K>& a) {
  Jet<K> value = jet_analytic(fn, a.base);
  Jet<K> deriv;
  switch (fn) {
    case AnalyticFn::Exp: deriv = value; break;
    case AnalyticFn::Log:
      deriv = jet_div(Jet<K>::constant(a.order(), field_traits<K>::one()), a.base);
      break;
    case AnalyticFn::Sin: deriv = jet_analytic(AnalyticFn::Cos, a.base); break;
    case AnalyticFn::Cos: deriv = -jet_analytic(AnalyticFn::Sin, a.base); break;
  }
  SensitivityJet<K> r(value, a.channels());
  for (std::size_t k = 0; k < a.channels(); ++k) r.dirs[k] = deriv * a.dirs[k];
  return r;
}

}  // namespace fps

#endif
