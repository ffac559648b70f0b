#pragma once

#include <cstddef>
#include <vector>

#include "klra/matrix.hpp"

namespace klra {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// CSR sparse matrix in canonical form: column indices strictly increasing
/// per row, duplicates summed at construction, no explicitly stored zeros.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<Triplet> entries);
  static SparseMatrix from_dense(const DenseMatrix& m, double drop_tol = 0.0);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  const std::vector<std::size_t>& row_offsets() const { return row_offsets_; }
  const std::vector<std::size_t>& col_indices() const { return col_indices_; }
  const std::vector<double>& values() const { return values_; }

  std::size_t row_begin(std::size_t i) const { return row_offsets_[i]; }
  std::size_t row_end(std::size_t i) const { return row_offsets_[i + 1]; }

  DenseMatrix to_dense() const;

  /// Dot product of rows i and j (merge join over sorted indices).
  double row_dot(std::size_t i, std::size_t j) const;
  double row_norm_sq(std::size_t i) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> col_indices_;
  std::vector<double> values_;
};

/// A * A^T, exploiting row sparsity. Symmetric by construction.
DenseMatrix gram(const SparseMatrix& a);

/// A * X for dense X.
DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& x);

/// A^T * X for dense X with A.rows() == X.rows().
DenseMatrix spmm_tn(const SparseMatrix& a, const DenseMatrix& x);

}  // namespace klra
