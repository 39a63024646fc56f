#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "bdmlab/rational.hpp"

namespace bdmlab {

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major matrix over Rational or double.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, from_int<T>(0)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::vector<T> row(std::size_t r) const {
    return std::vector<T>(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                          data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

namespace detail {

// Pivot choice: first nonzero entry for exact arithmetic, largest magnitude
// for floating point.
template <class T>
std::ptrdiff_t choose_pivot(const Matrix<T>& m, std::size_t col, std::size_t from_row) {
  std::ptrdiff_t best = -1;
  if constexpr (std::is_same_v<T, Rational>) {
    for (std::size_t r = from_row; r < m.rows(); ++r) {
      if (sgn(m(r, col)) != 0) return static_cast<std::ptrdiff_t>(r);
    }
  } else {
    double best_abs = 0.0;
    for (std::size_t r = from_row; r < m.rows(); ++r) {
      const double a = std::fabs(m(r, col));
      if (a > best_abs) {
        best_abs = a;
        best = static_cast<std::ptrdiff_t>(r);
      }
    }
  }
  return best;
}

template <class T>
bool negligible(const T& v, double scale) {
  if constexpr (std::is_same_v<T, Rational>) {
    (void)scale;
    return sgn(v) == 0;
  } else {
    return std::fabs(v) <= 1e-12 * scale;
  }
}

template <class T>
double max_abs(const Matrix<T>& m) {
  double s = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) s = std::max(s, std::fabs(to_double(m(r, c))));
  }
  return s;
}

}  // namespace detail

/// Reduced row echelon form in place; returns the pivot columns.
template <class T>
std::vector<std::size_t> row_reduce(Matrix<T>& m) {
  const double scale = std::max(1.0, detail::max_abs(m));
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    const auto p = detail::choose_pivot(m, col, row);
    if (p < 0 || detail::negligible(m(static_cast<std::size_t>(p), col), scale)) continue;
    const auto pr = static_cast<std::size_t>(p);
    if (pr != row) {
      for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(pr, c), m(row, c));
    }
    const T inv = from_int<T>(1) / m(row, col);
    for (std::size_t c = col; c < m.cols(); ++c) m(row, c) *= inv;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == row || is_zero(m(r, col))) continue;
      const T f = m(r, col);
      for (std::size_t c = col; c < m.cols(); ++c) m(r, c) -= f * m(row, c);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

template <class T>
std::size_t rank(Matrix<T> m) {
  return row_reduce(m).size();
}

/// Basis of {x : m x = 0}, one vector per free column.
template <class T>
std::vector<std::vector<T>> nullspace(Matrix<T> m) {
  const auto pivots = row_reduce(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<std::vector<T>> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    std::vector<T> x(m.cols(), from_int<T>(0));
    x[free] = from_int<T>(1);
    for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = -m(r, free);
    basis.push_back(std::move(x));
  }
  return basis;
}

/// LU factorisation with row pivoting of a square matrix; throws
/// SingularMatrixError when the matrix is singular.
template <class T>
class LUFactorization {
 public:
  explicit LUFactorization(Matrix<T> a) : lu_(std::move(a)), perm_(lu_.rows()) {
    if (lu_.rows() != lu_.cols()) throw std::invalid_argument("LU needs a square matrix");
    const std::size_t n = lu_.rows();
    const double scale = std::max(1.0, detail::max_abs(lu_));
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
      const auto p = detail::choose_pivot(lu_, k, k);
      if (p < 0 || detail::negligible(lu_(static_cast<std::size_t>(p), k), scale)) {
        throw SingularMatrixError("matrix is singular");
      }
      const auto pr = static_cast<std::size_t>(p);
      if (pr != k) {
        for (std::size_t c = 0; c < n; ++c) std::swap(lu_(pr, c), lu_(k, c));
        std::swap(perm_[pr], perm_[k]);
      }
      const T inv = from_int<T>(1) / lu_(k, k);
      for (std::size_t r = k + 1; r < n; ++r) {
        if (is_zero(lu_(r, k))) continue;
        lu_(r, k) *= inv;
        const T f = lu_(r, k);
        for (std::size_t c = k + 1; c < n; ++c) lu_(r, c) -= f * lu_(k, c);
      }
    }
  }

  std::size_t size() const { return lu_.rows(); }

  std::vector<T> solve(const std::vector<T>& b) const {
    const std::size_t n = lu_.rows();
    if (b.size() != n) throw std::invalid_argument("right-hand side has wrong length");
    std::vector<T> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      T s = b[perm_[i]];
      for (std::size_t j = 0; j < i; ++j) {
        if (!is_zero(lu_(i, j))) s -= lu_(i, j) * y[j];
      }
      y[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
      T s = y[i];
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!is_zero(lu_(i, j))) s -= lu_(i, j) * y[j];
      }
      y[i] = s / lu_(i, i);
    }
    return y;
  }

 private:
  Matrix<T> lu_;
  std::vector<std::size_t> perm_;
};

template <class T>
std::vector<T> solve(const Matrix<T>& a, const std::vector<T>& b) {
  return LUFactorization<T>(a).solve(b);
}

template <class T>
Matrix<T> inverse(const Matrix<T>& a) {
  LUFactorization<T> lu(a);
  const std::size_t n = a.rows();
  Matrix<T> inv(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<T> e(n, from_int<T>(0));
    e[c] = from_int<T>(1);
    const auto x = lu.solve(e);
    for (std::size_t r = 0; r < n; ++r) inv(r, c) = x[r];
  }
  return inv;
}

template <class T>
T determinant(Matrix<T> a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("determinant needs a square matrix");
  const std::size_t n = a.rows();
  T det = from_int<T>(1);
  for (std::size_t k = 0; k < n; ++k) {
    const auto p = detail::choose_pivot(a, k, k);
    if (p < 0 || is_zero(a(static_cast<std::size_t>(p), k))) return from_int<T>(0);
    const auto pr = static_cast<std::size_t>(p);
    if (pr != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(pr, c), a(k, c));
      det = -det;
    }
    det *= a(k, k);
    for (std::size_t r = k + 1; r < n; ++r) {
      if (is_zero(a(r, k))) continue;
      const T f = a(r, k) / a(k, k);
      for (std::size_t c = k; c < n; ++c) a(r, c) -= f * a(k, c);
    }
  }
  return det;
}

}  // namespace bdmlab
