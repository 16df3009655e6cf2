#ifndef FPS_FIELD_HPP
#define FPS_FIELD_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace fps {

// Exact rational scalar, arbitrary-precision numerator/denominator.
using Rational = mpq_class;

struct usage_error : std::logic_error {
  using std::logic_error::logic_error;
};

struct singular_evaluation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct unsupported_in_exact_mode_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Zero test for inexact modes: |v| <= atol + rtol * scale.
struct Tolerance {
  double atol = 1e-12;
  double rtol = 1e-9;

  double threshold(double scale) const { return atol + rtol * std::abs(scale); }
};

enum class FieldMode { Real64, Complex64, RationalExact };

inline const char* field_mode_name(FieldMode m) {
  switch (m) {
    case FieldMode::Real64: return "f64";
    case FieldMode::Complex64: return "c64";
    case FieldMode::RationalExact: return "rational";
  }
  return "?";
}

inline mpz_class binomial(unsigned long n, unsigned long k) {
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), n, k);
  return b;
}

inline Rational factorial_rat(unsigned long n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return Rational(f);
}

// Parses "p/q", integer, or decimal ("1.25", "3e-2") literals exactly.
inline Rational rational_from_string(const std::string& text) {
  std::string s = text;
  if (s.empty()) throw usage_error("empty rational literal");
  if (s.find('/') != std::string::npos) {
    Rational q;
    if (q.set_str(s, 10) != 0) throw usage_error("bad rational literal: " + text);
    q.canonicalize();
    return q;
  }
  bool neg = false;
  std::size_t pos = 0;
  if (s[pos] == '+' || s[pos] == '-') {
    neg = s[pos] == '-';
    ++pos;
  }
  std::string digits;
  long frac_digits = 0;
  long exponent = 0;
  bool seen_dot = false, seen_digit = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
      seen_digit = true;
      if (seen_dot) ++frac_digits;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else if ((c == 'e' || c == 'E') && seen_digit) {
      exponent = std::stol(s.substr(pos + 1));
      pos = s.size() - 1;
    } else {
      throw usage_error("bad numeric literal: " + text);
    }
  }
  if (!seen_digit) throw usage_error("bad numeric literal: " + text);
  mpz_class num(digits.empty() ? "0" : digits);
  Rational q(num);
  long shift = exponent - frac_digits;
  if (shift != 0) {
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(shift)));
    if (shift > 0)
      q *= Rational(p10);
    else
      q /= Rational(p10);
  }
  if (neg) q = -q;
  q.canonicalize();
  return q;
}

inline std::string rational_to_string(const Rational& q) { return q.get_str(); }

template <class K>
struct field_traits;

template <>
struct field_traits<double> {
  static constexpr bool is_exact = false;
  static constexpr bool has_analytic = true;
  static const char* name() { return "f64"; }
  static double from_rational(const Rational& q) { return q.get_d(); }
  static double from_int(long v) { return static_cast<double>(v); }
  static double magnitude(double v) { return std::abs(v); }
  static bool is_zero(double v, const Tolerance& tol, double scale) {
    return std::abs(v) <= tol.threshold(scale);
  }
  static double zero() { return 0.0; }
  static double one() { return 1.0; }
};

template <>
struct field_traits<std::complex<double>> {
  static constexpr bool is_exact = false;
  static constexpr bool has_analytic = true;
  static const char* name() { return "c64"; }
  static std::complex<double> from_rational(const Rational& q) { return {q.get_d(), 0.0}; }
  static std::complex<double> from_int(long v) { return {static_cast<double>(v), 0.0}; }
  static double magnitude(const std::complex<double>& v) { return std::abs(v); }
  static bool is_zero(const std::complex<double>& v, const Tolerance& tol, double scale) {
    return std::abs(v) <= tol.threshold(scale);
  }
  static std::complex<double> zero() { return {0.0, 0.0}; }
  static std::complex<double> one() { return {1.0, 0.0}; }
};

template <>
struct field_traits<Rational> {
  static constexpr bool is_exact = true;
  static constexpr bool has_analytic = false;
  static const char* name() { return "rational"; }
  static Rational from_rational(const Rational& q) { return q; }
  static Rational from_int(long v) { return Rational(v); }
  static double magnitude(const Rational& v) { return std::abs(v.get_d()); }
  static bool is_zero(const Rational& v, const Tolerance&, double) { return sgn(v) == 0; }
  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
};

template <class K>
bool is_zero(const K& v, const Tolerance& tol, double scale = 1.0) {
  return field_traits<K>::is_zero(v, tol, scale);
}

template <class K>
double magnitude(const K& v) {
  return field_traits<K>::magnitude(v);
}

}  // namespace fps

#endif
