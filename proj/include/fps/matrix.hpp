#ifndef FPS_MATRIX_HPP
#define FPS_MATRIX_HPP

#include <algorithm>
#include <vector>

#include "fps/field.hpp"

namespace fps {

template <class K>
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(int rows, int cols)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, field_traits<K>::zero()) {}

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = field_traits<K>::one();
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  K& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  const K& operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  double max_magnitude() const {
    double m = 0.0;
    for (const K& v : data_) m = std::max(m, magnitude(v));
    return m;
  }

  bool all_zero(const Tolerance& tol, double scale) const {
    for (const K& v : data_)
      if (!is_zero(v, tol, scale)) return false;
    return true;
  }

  friend Matrix operator+(const Matrix& a, const Matrix& b) {
    Matrix r(a.rows_, a.cols_);
    for (std::size_t i = 0; i < a.data_.size(); ++i) r.data_[i] = a.data_[i] + b.data_[i];
    return r;
  }

  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    Matrix r(a.rows_, a.cols_);
    for (std::size_t i = 0; i < a.data_.size(); ++i) r.data_[i] = a.data_[i] - b.data_[i];
    return r;
  }

  friend Matrix operator*(const K& s, const Matrix& a) {
    Matrix r(a.rows_, a.cols_);
    for (std::size_t i = 0; i < a.data_.size(); ++i) r.data_[i] = s * a.data_[i];
    return r;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    Matrix r(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k)
        for (int j = 0; j < b.cols_; ++j) r(i, j) = r(i, j) + a(i, k) * b(k, j);
    return r;
  }

  std::vector<K> apply(const std::vector<K>& v) const {
    std::vector<K> r(rows_, field_traits<K>::zero());
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r[i] = r[i] + (*this)(i, j) * v[j];
    return r;
  }

 private:
  int rows_, cols_;
  std::vector<K> data_;
};

template <class K>
double max_mag(const std::vector<K>& v) {
  double s = 0.0;
  for (const K& x : v) s = std::max(s, magnitude(x));
  return s;
}

template <class K>
bool all_zero_vec(const std::vector<K>& v, const Tolerance& tol, double scale) {
  for (const K& x : v)
    if (!is_zero(x, tol, scale)) return false;
  return true;
}

template <class K>
std::vector<K> negate_vec(std::vector<K> v) {
  for (K& x : v) x = -x;
  return v;
}

template <class K>
struct LinearSolve {
  bool feasible = false;
  std::vector<K> particular;                // free columns set to zero
  std::vector<std::vector<K>> nullspace;    // basis of A x = 0
  std::vector<int> pivot_columns;
  int rank = 0;
  double residual = 0.0;                    // magnitude witness when infeasible
};

// Gauss-Jordan with tolerance pivoting (inexact modes pick the largest pivot;
// the exact mode takes the first nonzero entry).
template <class K>
LinearSolve<K> solve_linear(const Matrix<K>& a, const std::vector<K>& b, const Tolerance& tol) {
  const int m = a.rows(), n = a.cols();
  const double scale = std::max({1.0, a.max_magnitude(),
                                 [&] {
                                   double s = 0.0;
                                   for (const K& v : b) s = std::max(s, magnitude(v));
                                   return s;
                                 }()});
  Matrix<K> w(m, n + 1);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) w(i, j) = a(i, j);
    w(i, n) = b[i];
  }

  std::vector<int> pivot_col;
  int row = 0;
  for (int col = 0; col < n && row < m; ++col) {
    int best = -1;
    if constexpr (field_traits<K>::is_exact) {
      for (int i = row; i < m; ++i)
        if (!is_zero(w(i, col), tol, scale)) {
          best = i;
          break;
        }
    } else {
      double best_mag = 0.0;
      for (int i = row; i < m; ++i) {
        double mag = magnitude(w(i, col));
        if (mag > best_mag) {
          best_mag = mag;
          best = i;
        }
      }
      if (best >= 0 && is_zero(w(best, col), tol, scale)) best = -1;
    }
    if (best < 0) continue;
    if (best != row)
      for (int j = 0; j <= n; ++j) std::swap(w(best, j), w(row, j));
    K inv_pivot = field_traits<K>::one() / w(row, col);
    for (int j = 0; j <= n; ++j) w(row, j) = inv_pivot * w(row, j);
    for (int i = 0; i < m; ++i) {
      if (i == row) continue;
      K factor = w(i, col);
      if (field_traits<K>::is_exact && factor == field_traits<K>::zero()) continue;
      for (int j = 0; j <= n; ++j) w(i, j) = w(i, j) - factor * w(row, j);
    }
    pivot_col.push_back(col);
    ++row;
  }

  LinearSolve<K> out;
  out.rank = row;
  out.pivot_columns = pivot_col;
  out.feasible = true;
  for (int i = row; i < m; ++i) {
    double mag = magnitude(w(i, n));
    if (!is_zero(w(i, n), tol, scale)) {
      out.feasible = false;
      out.residual = std::max(out.residual, mag);
    }
  }
  if (out.feasible) {
    out.particular.assign(n, field_traits<K>::zero());
    for (int i = 0; i < row; ++i) out.particular[pivot_col[i]] = w(i, n);
  }
  std::vector<bool> is_pivot(n, false);
  for (int c : pivot_col) is_pivot[c] = true;
  for (int free_col = 0; free_col < n; ++free_col) {
    if (is_pivot[free_col]) continue;
    std::vector<K> v(n, field_traits<K>::zero());
    v[free_col] = field_traits<K>::one();
    for (int i = 0; i < row; ++i) v[pivot_col[i]] = -w(i, free_col);
    out.nullspace.push_back(std::move(v));
  }
  return out;
}

template <class K>
int matrix_rank(const Matrix<K>& a, const Tolerance& tol) {
  std::vector<K> zero(a.rows(), field_traits<K>::zero());
  return solve_linear(a, zero, tol).rank;
}

template <class K>
std::vector<std::vector<K>> nullspace_basis(const Matrix<K>& a, const Tolerance& tol) {
  std::vector<K> zero(a.rows(), field_traits<K>::zero());
  return solve_linear(a, zero, tol).nullspace;
}

// Basis of the left nullspace: rows w with w A = 0.
template <class K>
std::vector<std::vector<K>> left_nullspace_basis(const Matrix<K>& a, const Tolerance& tol) {
  Matrix<K> t(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return nullspace_basis(t, tol);
}

template <class K>
K determinant(Matrix<K> a, const Tolerance& tol) {
  const int n = a.rows();
  if (n != a.cols()) throw usage_error("determinant of non-square matrix");
  const double scale = std::max(1.0, a.max_magnitude());
  K det = field_traits<K>::one();
  for (int col = 0; col < n; ++col) {
    int best = -1;
    if constexpr (field_traits<K>::is_exact) {
      for (int i = col; i < n; ++i)
        if (a(i, col) != field_traits<K>::zero()) {
          best = i;
          break;
        }
    } else {
      double best_mag = 0.0;
      for (int i = col; i < n; ++i)
        if (magnitude(a(i, col)) > best_mag) {
          best_mag = magnitude(a(i, col));
          best = i;
        }
      if (best >= 0 && is_zero(a(best, col), tol, scale)) best = -1;
    }
    if (best < 0) return field_traits<K>::zero();
    if (best != col) {
      for (int j = 0; j < n; ++j) std::swap(a(best, j), a(col, j));
      det = -det;
    }
    det = det * a(col, col);
    K inv = field_traits<K>::one() / a(col, col);
    for (int i = col + 1; i < n; ++i) {
      K f = inv * a(i, col);
      for (int j = col; j < n; ++j) a(i, j) = a(i, j) - f * a(col, j);
    }
  }
  return det;
}

}  // namespace fps

#endif
