#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "klra/matrix.hpp"
#include "klra/rng.hpp"
#include "klra/sparse.hpp"

namespace klra::sketch {

/// A CountSketch matrix S in R^{input_dim x output_dim}: row j has a single
/// nonzero, sign[j] at column bucket[j].
struct CountSketchMatrix {
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  std::vector<std::size_t> bucket;  // one entry per input coordinate
  std::vector<double> sign;         // +-1

  static CountSketchMatrix sample(std::size_t input_dim,
                                  std::size_t output_dim, SeededRng& rng);
};

/// X * S, collapsing the columns of X into output_dim buckets. O(size of X),
/// and O(nnz) for the sparse overload.
DenseMatrix countsketch_apply(const DenseMatrix& x,
                              const CountSketchMatrix& s);
DenseMatrix countsketch_apply(const SparseMatrix& x,
                              const CountSketchMatrix& s);

/// S^T * X, collapsing the rows of X (the symmetric left-side variant).
DenseMatrix countsketch_apply_left(const CountSketchMatrix& s,
                                   const DenseMatrix& x);
/// S^T applied to the rows of sparse A, yielding a dense output_dim x cols.
DenseMatrix countsketch_apply_left(const CountSketchMatrix& s,
                                   const SparseMatrix& x);

/// i.i.d. standard normal entries drawn in row-major order.
DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols,
                            SeededRng& rng);

struct FastGaussianProduct {
  DenseMatrix product;               // n x s, distributed close to A*G
  std::vector<double> column_norms;  // norms of the effective G's columns
  std::size_t inner_dim = 0;         // CountSketch width t (== d on the
                                     // exact path)
  bool exact_path = false;
};

/// Default CountSketch width for the composed product: ceil of
/// n^2 sqrt(s) ln^4(max(d,2)) / delta, capped at d. At or beyond d the
/// composition cannot beat the plain product, so the exact path is taken.
std::size_t fast_gaussian_inner_dim(std::size_t n, std::size_t d,
                                    std::size_t s, double delta);

/// B = (A C) G' where C is a d x t CountSketch and G' a t x s Gaussian
/// matrix; the distribution of B approaches that of A G as t grows. When
/// t >= d this falls back to computing A G exactly (bitwise identical to
/// gaussian_matrix followed by multiplication with the same rng).
/// column_norms are the column norms of the effective Gaussian factor
/// (G, or C G'), which downstream frequency rescaling needs.
FastGaussianProduct fast_gaussian_product(
    const SparseMatrix& a, std::size_t s, double delta,
    std::optional<std::size_t> inner_dim_override, SeededRng& rng);

/// Row sample with importance weights 1/sqrt(s * p_i).
struct RowSampler {
  std::size_t source_rows = 0;
  std::vector<std::size_t> indices;
  std::vector<double> weights;
};

/// s i.i.d. draws of rows of Z proportional to squared row norms (the
/// leverage scores when Z is orthonormal). Throws if Z has no nonzero row.
RowSampler leverage_sample(const DenseMatrix& z, std::size_t s,
                           SeededRng& rng);

/// Apply the sampler: rows indices[t] of X scaled by weights[t].
DenseMatrix sample_rows(const RowSampler& sampler, const DenseMatrix& x);

/// Solve min_W || S(Z W - Y) ||_F over the sampled rows.
DenseMatrix sampled_least_squares(const DenseMatrix& z, const DenseMatrix& y,
                                  const RowSampler& sampler);

}  // namespace klra::sketch
