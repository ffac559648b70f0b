#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace klra {

/// Row-major dense matrix over an arbitrary real scalar type.
///
/// The scalar parameter exists so the same routines can run in double and in
/// software extended precision (see extprec.hpp). Most of the library works
/// with Mat<double>, aliased to DenseMatrix below.
template <typename T>
class Mat {
 public:
  Mat() = default;

  Mat(std::size_t rows, std::size_t cols, T value = T(0))
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  Mat(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
      throw std::invalid_argument("Mat: entry count does not match rows*cols");
  }

  /// Build from nested braces, e.g. Mat<double>({{1,2},{3,4}}).
  Mat(std::initializer_list<std::initializer_list<T>> init) {
    rows_ = init.size();
    cols_ = rows_ == 0 ? 0 : init.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_)
        throw std::invalid_argument("Mat: ragged initializer");
      for (const T& v : row) data_.push_back(v);
    }
  }

  static Mat identity(std::size_t n) {
    Mat I(n, n);
    for (std::size_t i = 0; i < n; ++i) I(i, i) = T(1);
    return I;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  T* row_ptr(std::size_t i) { return data_.data() + i * cols_; }
  const T* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using DenseMatrix = Mat<double>;

template <typename T>
Mat<T> transpose(const Mat<T>& a) {
  Mat<T> out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

/// C = A * B with the classic ikj ordering (row-major friendly).
template <typename T>
Mat<T> matmul(const Mat<T>& a, const Mat<T>& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("matmul: inner dimensions differ (" +
                                std::to_string(a.cols()) + " vs " +
                                std::to_string(b.rows()) + ")");
  Mat<T> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    T* ci = c.row_ptr(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const T aik = a(i, k);
      if (aik == T(0)) continue;
      const T* bk = b.row_ptr(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

/// A^T * B without materializing the transpose.
template <typename T>
Mat<T> matmul_tn(const Mat<T>& a, const Mat<T>& b) {
  if (a.rows() != b.rows())
    throw std::invalid_argument("matmul_tn: row counts differ");
  Mat<T> c(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const T* ak = a.row_ptr(k);
    const T* bk = b.row_ptr(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const T aki = ak[i];
      if (aki == T(0)) continue;
      T* ci = c.row_ptr(i);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aki * bk[j];
    }
  }
  return c;
}

/// A * B^T.
template <typename T>
Mat<T> matmul_nt(const Mat<T>& a, const Mat<T>& b) {
  if (a.cols() != b.cols())
    throw std::invalid_argument("matmul_nt: column counts differ");
  Mat<T> c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const T* ai = a.row_ptr(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const T* bj = b.row_ptr(j);
      T acc(0);
      for (std::size_t k = 0; k < a.cols(); ++k) acc += ai[k] * bj[k];
      c(i, j) = acc;
    }
  }
  return c;
}

template <typename T>
Mat<T> operator+(const Mat<T>& a, const Mat<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("matrix add: shape mismatch");
  Mat<T> c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] += b.data()[i];
  return c;
}

template <typename T>
Mat<T> operator-(const Mat<T>& a, const Mat<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("matrix sub: shape mismatch");
  Mat<T> c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] -= b.data()[i];
  return c;
}

template <typename T>
Mat<T> scaled(const Mat<T>& a, T s) {
  Mat<T> c = a;
  for (auto& v : c.data()) v *= s;
  return c;
}

template <typename T>
T frobenius_norm_sq(const Mat<T>& m) {
  T acc(0);
  for (const T& v : m.data()) acc += v * v;
  return acc;
}

template <typename T>
T frobenius_norm(const Mat<T>& m) {
  using std::sqrt;
  return sqrt(frobenius_norm_sq(m));
}

template <typename T>
T trace(const Mat<T>& m) {
  T acc(0);
  const std::size_t n = m.rows() < m.cols() ? m.rows() : m.cols();
  for (std::size_t i = 0; i < n; ++i) acc += m(i, i);
  return acc;
}

inline bool is_finite(const DenseMatrix& m) {
  for (double v : m.data())
    if (!std::isfinite(v)) return false;
  return true;
}

inline double max_abs(const DenseMatrix& m) {
  double best = 0;
  for (double v : m.data()) best = std::max(best, std::fabs(v));
  return best;
}

/// Largest |K(i,j) - K(j,i)| of a square matrix.
inline double symmetry_gap(const DenseMatrix& k) {
  double gap = 0;
  for (std::size_t i = 0; i < k.rows(); ++i)
    for (std::size_t j = i + 1; j < k.cols(); ++j)
      gap = std::max(gap, std::fabs(k(i, j) - k(j, i)));
  return gap;
}

template <typename To, typename From>
Mat<To> convert(const Mat<From>& m) {
  Mat<To> out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.size(); ++i)
    out.data()[i] = static_cast<To>(m.data()[i]);
  return out;
}

}  // namespace klra
