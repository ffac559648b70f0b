#include "klra/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace klra {

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> entries) {
  for (const Triplet& t : entries) {
    if (t.row >= rows || t.col >= cols)
      throw std::invalid_argument("SparseMatrix: triplet index out of range");
    if (!std::isfinite(t.value))
      throw std::invalid_argument("SparseMatrix: non-finite value");
  }
  std::sort(entries.begin(), entries.end(),
            [](const Triplet& a, const Triplet& b) {
              return a.row != b.row ? a.row < b.row : a.col < b.col;
            });

  SparseMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.row_offsets_.assign(rows + 1, 0);
  m.col_indices_.reserve(entries.size());
  m.values_.reserve(entries.size());

  std::size_t i = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    while (i < entries.size() && entries[i].row == r) {
      std::size_t c = entries[i].col;
      double v = 0;
      while (i < entries.size() && entries[i].row == r && entries[i].col == c) {
        v += entries[i].value;  // duplicates summed at ingestion
        ++i;
      }
      if (v != 0.0) {
        m.col_indices_.push_back(c);
        m.values_.push_back(v);
      }
    }
    m.row_offsets_[r + 1] = m.values_.size();
  }
  return m;
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& d, double drop_tol) {
  std::vector<Triplet> trips;
  for (std::size_t i = 0; i < d.rows(); ++i)
    for (std::size_t j = 0; j < d.cols(); ++j)
      if (std::fabs(d(i, j)) > drop_tol) trips.push_back({i, j, d(i, j)});
  return from_triplets(d.rows(), d.cols(), std::move(trips));
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = row_begin(i); k < row_end(i); ++k)
      d(i, col_indices_[k]) = values_[k];
  return d;
}

double SparseMatrix::row_dot(std::size_t i, std::size_t j) const {
  std::size_t a = row_begin(i), ae = row_end(i);
  std::size_t b = row_begin(j), be = row_end(j);
  double acc = 0;
  while (a < ae && b < be) {
    if (col_indices_[a] == col_indices_[b]) {
      acc += values_[a] * values_[b];
      ++a;
      ++b;
    } else if (col_indices_[a] < col_indices_[b]) {
      ++a;
    } else {
      ++b;
    }
  }
  return acc;
}

double SparseMatrix::row_norm_sq(std::size_t i) const {
  double acc = 0;
  for (std::size_t k = row_begin(i); k < row_end(i); ++k)
    acc += values_[k] * values_[k];
  return acc;
}

DenseMatrix gram(const SparseMatrix& a) {
  const std::size_t n = a.rows();
  DenseMatrix g(n, n);
  // Scatter row i into a dense workspace, then sparse-dot every later row
  // against it; total work is sum_i nnz(row i) + n * nnz(A).
  std::vector<double> work(a.cols(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = a.row_begin(i); k < a.row_end(i); ++k)
      work[a.col_indices()[k]] = a.values()[k];
    g(i, i) = a.row_norm_sq(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      double acc = 0;
      for (std::size_t k = a.row_begin(j); k < a.row_end(j); ++k)
        acc += a.values()[k] * work[a.col_indices()[k]];
      g(i, j) = acc;
      g(j, i) = acc;
    }
    for (std::size_t k = a.row_begin(i); k < a.row_end(i); ++k)
      work[a.col_indices()[k]] = 0.0;
  }
  return g;
}

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& x) {
  if (a.cols() != x.rows())
    throw std::invalid_argument("spmm: dimension mismatch");
  DenseMatrix y(a.rows(), x.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* yi = y.row_ptr(i);
    for (std::size_t k = a.row_begin(i); k < a.row_end(i); ++k) {
      const double v = a.values()[k];
      const double* xr = x.row_ptr(a.col_indices()[k]);
      for (std::size_t j = 0; j < x.cols(); ++j) yi[j] += v * xr[j];
    }
  }
  return y;
}

DenseMatrix spmm_tn(const SparseMatrix& a, const DenseMatrix& x) {
  if (a.rows() != x.rows())
    throw std::invalid_argument("spmm_tn: dimension mismatch");
  DenseMatrix y(a.cols(), x.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* xi = x.row_ptr(i);
    for (std::size_t k = a.row_begin(i); k < a.row_end(i); ++k) {
      double* yr = y.row_ptr(a.col_indices()[k]);
      const double v = a.values()[k];
      for (std::size_t j = 0; j < x.cols(); ++j) yr[j] += v * xi[j];
    }
  }
  return y;
}

}  // namespace klra
