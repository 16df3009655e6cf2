#ifndef FPS_POLY_HPP
#define FPS_POLY_HPP

#include <vector>

#include "fps/field.hpp"
#include "fps/matrix.hpp"

namespace fps {

// Univariate polynomial with coefficients in K, ascending order.
template <class K>
class Poly {
 public:
  Poly() : coeffs_(1, field_traits<K>::zero()) {}
  explicit Poly(std::vector<K> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.push_back(field_traits<K>::zero());
    normalize();
  }
  static Poly constant(const K& c) { return Poly(std::vector<K>{c}); }
  static Poly variable() {
    return Poly(std::vector<K>{field_traits<K>::zero(), field_traits<K>::one()});
  }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<K>& coeffs() const { return coeffs_; }
  const K& operator[](int i) const { return coeffs_[i]; }
  K coeff_or_zero(int i) const {
    return i <= degree() ? coeffs_[i] : field_traits<K>::zero();
  }

  bool is_structurally_zero() const {
    return coeffs_.size() == 1 && coeffs_[0] == field_traits<K>::zero();
  }

  bool is_zero(const Tolerance& tol, double scale) const {
    for (const K& c : coeffs_)
      if (!fps::is_zero(c, tol, scale)) return false;
    return true;
  }

  double max_magnitude() const {
    double m = 0.0;
    for (const K& c : coeffs_) m = std::max(m, magnitude(c));
    return m;
  }

  K eval(const K& x) const {
    K acc = field_traits<K>::zero();
    for (int i = degree(); i >= 0; --i) acc = acc * x + coeffs_[i];
    return acc;
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    std::vector<K> c(std::max(a.coeffs_.size(), b.coeffs_.size()), field_traits<K>::zero());
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i < a.coeffs_.size()) c[i] = c[i] + a.coeffs_[i];
      if (i < b.coeffs_.size()) c[i] = c[i] + b.coeffs_[i];
    }
    return Poly(std::move(c));
  }

  friend Poly operator-(const Poly& a, const Poly& b) {
    std::vector<K> c(std::max(a.coeffs_.size(), b.coeffs_.size()), field_traits<K>::zero());
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i < a.coeffs_.size()) c[i] = c[i] + a.coeffs_[i];
      if (i < b.coeffs_.size()) c[i] = c[i] - b.coeffs_[i];
    }
    return Poly(std::move(c));
  }

  friend Poly operator-(const Poly& a) {
    std::vector<K> c(a.coeffs_);
    for (K& v : c) v = -v;
    return Poly(std::move(c));
  }

  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_structurally_zero() || b.is_structurally_zero()) return Poly();
    std::vector<K> c(a.coeffs_.size() + b.coeffs_.size() - 1, field_traits<K>::zero());
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j)
        c[i + j] = c[i + j] + a.coeffs_[i] * b.coeffs_[j];
    return Poly(std::move(c));
  }

  friend Poly operator*(const K& s, const Poly& a) {
    std::vector<K> c(a.coeffs_);
    for (K& v : c) v = s * v;
    return Poly(std::move(c));
  }

 private:
  void normalize() {
    while (coeffs_.size() > 1 && coeffs_.back() == field_traits<K>::zero()) coeffs_.pop_back();
  }

  std::vector<K> coeffs_;
};

// Quotient of an exact polynomial division; the remainder is structurally zero
// inside fraction-free elimination and is discarded.
template <class K>
Poly<K> poly_divide_exact(const Poly<K>& a, const Poly<K>& b) {
  if (b.is_structurally_zero()) throw singular_evaluation_error("polynomial division by zero");
  if (a.is_structurally_zero()) return Poly<K>();
  int da = a.degree(), db = b.degree();
  if (da < db) return Poly<K>();
  std::vector<K> rem(a.coeffs());
  std::vector<K> quot(da - db + 1, field_traits<K>::zero());
  const K lead = b[db];
  for (int k = da - db; k >= 0; --k) {
    K q = rem[db + k] / lead;
    quot[k] = q;
    for (int j = 0; j <= db; ++j) rem[j + k] = rem[j + k] - q * b[j];
  }
  return Poly<K>(std::move(quot));
}

template <class K>
struct PolyMatrix {
  int rows = 0, cols = 0;
  std::vector<Poly<K>> entries;

  PolyMatrix() = default;
  PolyMatrix(int r, int c) : rows(r), cols(c), entries(static_cast<std::size_t>(r) * c) {}

  Poly<K>& operator()(int i, int j) { return entries[static_cast<std::size_t>(i) * cols + j]; }
  const Poly<K>& operator()(int i, int j) const {
    return entries[static_cast<std::size_t>(i) * cols + j];
  }

  double max_magnitude() const {
    double m = 0.0;
    for (const auto& p : entries) m = std::max(m, p.max_magnitude());
    return m;
  }

  Matrix<K> eval_at(const K& x) const {
    Matrix<K> m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = (*this)(i, j).eval(x);
    return m;
  }
};

// Determinant of a square polynomial matrix by fraction-free (Bareiss)
// elimination over K[l]; all divisions are exact in the polynomial ring.
template <class K>
Poly<K> poly_det(PolyMatrix<K> m, const Tolerance& tol) {
  const int n = m.rows;
  if (n != m.cols) throw usage_error("determinant of non-square polynomial matrix");
  if (n == 0) return Poly<K>::constant(field_traits<K>::one());
  const double scale = std::max(1.0, m.max_magnitude());
  bool negate = false;
  Poly<K> prev = Poly<K>::constant(field_traits<K>::one());
  for (int k = 0; k + 1 < n; ++k) {
    int best = -1;
    double best_mag = 0.0;
    for (int i = k; i < n; ++i) {
      if (m(i, k).is_zero(tol, scale)) continue;
      double mag = magnitude(m(i, k)[m(i, k).degree()]);
      if (best < 0 || mag > best_mag) {
        best = i;
        best_mag = mag;
      }
    }
    if (best < 0) return Poly<K>();
    if (best != k) {
      for (int j = 0; j < n; ++j) std::swap(m(best, j), m(k, j));
      negate = !negate;
    }
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j)
        m(i, j) = poly_divide_exact(m(k, k) * m(i, j) - m(i, k) * m(k, j), prev);
      m(i, k) = Poly<K>();
    }
    prev = m(k, k);
  }
  Poly<K> det = m(n - 1, n - 1);
  return negate ? -det : det;
}

// All r-by-r minors obtained by choosing r columns (rows kept whole, r <= cols).
template <class K>
std::vector<Poly<K>> poly_row_minors(const PolyMatrix<K>& m, const Tolerance& tol) {
  const int r = m.rows, c = m.cols;
  std::vector<Poly<K>> minors;
  std::vector<int> pick(r);
  for (int i = 0; i < r; ++i) pick[i] = i;
  while (true) {
    PolyMatrix<K> sub(r, r);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) sub(i, j) = m(i, pick[j]);
    minors.push_back(poly_det(sub, tol));
    int pos = r - 1;
    while (pos >= 0 && pick[pos] == c - r + pos) --pos;
    if (pos < 0) break;
    ++pick[pos];
    for (int i = pos + 1; i < r; ++i) pick[i] = pick[i - 1] + 1;
  }
  return minors;
}

}  // namespace fps

#endif
