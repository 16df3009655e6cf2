#ifndef FPS_JET_HPP
#define FPS_JET_HPP

#include <vector>

#include "fps/field.hpp"

namespace fps {

enum class AnalyticFn { Exp, Log, Sin, Cos };

inline const char* analytic_fn_name(AnalyticFn f) {
  switch (f) {
    case AnalyticFn::Exp: return "exp";
    case AnalyticFn::Log: return "log";
    case AnalyticFn::Sin: return "sin";
    case AnalyticFn::Cos: return "cos";
  }
  return "?";
}

// Truncated power series sum a_i eps^i, i <= order. Plain coefficients,
// no factorial scaling; arithmetic is polynomial arithmetic mod eps^{order+1}.
template <class K>
class Jet {
 public:
  Jet() : coeffs_(1, field_traits<K>::zero()) {}
  explicit Jet(int order) : coeffs_(order + 1, field_traits<K>::zero()) {}
  Jet(int order, const K& constant) : coeffs_(order + 1, field_traits<K>::zero()) {
    coeffs_[0] = constant;
  }

  static Jet constant(int order, const K& value) { return Jet(order, value); }

  // The series "value + eps".
  static Jet variable(int order, const K& value) {
    Jet j(order, value);
    if (order >= 1) j.coeffs_[1] = field_traits<K>::one();
    return j;
  }

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  const K& operator[](int i) const { return coeffs_[i]; }
  K& operator[](int i) { return coeffs_[i]; }
  const std::vector<K>& coeffs() const { return coeffs_; }

  Jet truncated(int new_order) const {
    Jet r(new_order);
    for (int i = 0; i <= new_order && i <= order(); ++i) r.coeffs_[i] = coeffs_[i];
    return r;
  }

  double max_magnitude() const {
    double m = 0.0;
    for (const K& c : coeffs_) m = std::max(m, magnitude(c));
    return m;
  }

  friend Jet operator+(const Jet& a, const Jet& b) {
    check_orders(a, b);
    Jet r(a.order());
    for (int i = 0; i <= a.order(); ++i) r.coeffs_[i] = a.coeffs_[i] + b.coeffs_[i];
    return r;
  }

  friend Jet operator-(const Jet& a, const Jet& b) {
    check_orders(a, b);
    Jet r(a.order());
    for (int i = 0; i <= a.order(); ++i) r.coeffs_[i] = a.coeffs_[i] - b.coeffs_[i];
    return r;
  }

  friend Jet operator-(const Jet& a) {
    Jet r(a.order());
    for (int i = 0; i <= a.order(); ++i) r.coeffs_[i] = -a.coeffs_[i];
    return r;
  }

  // Cauchy product truncated at the common order.
  friend Jet operator*(const Jet& a, const Jet& b) {
    check_orders(a, b);
    Jet r(a.order());
    for (int i = 0; i <= a.order(); ++i) {
      K acc = field_traits<K>::zero();
      for (int j = 0; j <= i; ++j) acc = acc + a.coeffs_[j] * b.coeffs_[i - j];
      r.coeffs_[i] = acc;
    }
    return r;
  }

  friend Jet operator*(const K& s, const Jet& a) {
    Jet r(a.order());
    for (int i = 0; i <= a.order(); ++i) r.coeffs_[i] = s * a.coeffs_[i];
    return r;
  }

  static void check_orders(const Jet& a, const Jet& b) {
    if (a.order() != b.order()) throw usage_error("jet order mismatch");
  }

 private:
  std::vector<K> coeffs_;
};

template <class K>
Jet<K> jet_div(const Jet<K>& a, const Jet<K>& b) {
  Jet<K>::check_orders(a, b);
  if (field_traits<K>::is_exact ? (b[0] == field_traits<K>::zero()) : (b[0] == K{})) {
    throw singular_evaluation_error("jet division by series with zero constant term");
  }
  Jet<K> q(a.order());
  for (int i = 0; i <= a.order(); ++i) {
    K acc = a[i];
    for (int j = 0; j < i; ++j) acc = acc - q[j] * b[i - j];
    q[i] = acc / b[0];
  }
  return q;
}

template <class K>
Jet<K> jet_pow(const Jet<K>& a, unsigned exponent) {
  Jet<K> r = Jet<K>::constant(a.order(), field_traits<K>::one());
  Jet<K> base = a;
  unsigned e = exponent;
  while (e > 0) {
    if (e & 1u) r = r * base;
    e >>= 1u;
    if (e > 0) base = base * base;
  }
  return r;
}

// Composition of a named analytic primitive with the jet, via the standard
// convolution recurrences. Rejected for exact scalars.
template <class K>
Jet<K> jet_analytic(AnalyticFn fn, const Jet<K>& a) {
  if constexpr (!field_traits<K>::has_analytic) {
    (void)a;
    throw unsupported_in_exact_mode_error(std::string(analytic_fn_name(fn)) +
                                          " is not available in rational mode");
  } else {
    const int N = a.order();
    Jet<K> r(N);
    switch (fn) {
      case AnalyticFn::Exp: {
        r[0] = std::exp(a[0]);
        for (int i = 1; i <= N; ++i) {
          K acc{};
          for (int j = 1; j <= i; ++j) acc += K(static_cast<double>(j)) * a[j] * r[i - j];
          r[i] = acc / K(static_cast<double>(i));
        }
        return r;
      }
      case AnalyticFn::Log: {
        if (a[0] == K{}) throw singular_evaluation_error("log of series with zero constant term");
        r[0] = std::log(a[0]);
        for (int i = 1; i <= N; ++i) {
          K acc = K(static_cast<double>(i)) * a[i];
          for (int j = 1; j < i; ++j) acc -= K(static_cast<double>(j)) * r[j] * a[i - j];
          r[i] = acc / (K(static_cast<double>(i)) * a[0]);
        }
        return r;
      }
      case AnalyticFn::Sin:
      case AnalyticFn::Cos: {
        Jet<K> s(N), c(N);
        s[0] = std::sin(a[0]);
        c[0] = std::cos(a[0]);
        for (int i = 1; i <= N; ++i) {
          K sa{}, ca{};
          for (int j = 1; j <= i; ++j) {
            sa += K(static_cast<double>(j)) * a[j] * c[i - j];
            ca += K(static_cast<double>(j)) * a[j] * s[i - j];
          }
          s[i] = sa / K(static_cast<double>(i));
          c[i] = -ca / K(static_cast<double>(i));
        }
        return fn == AnalyticFn::Sin ? s : c;
      }
    }
    throw usage_error("unknown analytic primitive");
  }
}

}  // namespace fps

#endif
