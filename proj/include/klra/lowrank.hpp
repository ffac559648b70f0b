#pragma once

#include <cstddef>
#include <optional>

#include "klra/factor.hpp"
#include "klra/kernels.hpp"
#include "klra/matrix.hpp"
#include "klra/rng.hpp"
#include "klra/sparse.hpp"

namespace klra::lowrank {

/// Sketch dimensions for the Gram low-rank approximation. The outer sketch
/// width is ceil(alpha k/eps); the refinement width ceil(beta (k/eps)^2),
/// never below the outer width. A sketch whose width reaches the input
/// dimension degenerates to the identity (sketching past full dimension
/// cannot help).
struct GramLraConfig {
  std::size_t k = 1;
  double epsilon = 0.5;
  double alpha = 10.0;
  double beta = 10.0;

  std::size_t outer_width() const {
    return static_cast<std::size_t>(
        std::ceil(alpha * static_cast<double>(k) / epsilon));
  }
  std::size_t refine_width() const {
    const double ratio = static_cast<double>(k) / epsilon;
    return std::max(outer_width(), static_cast<std::size_t>(
                                       std::ceil(beta * ratio * ratio)));
  }
};

struct KernelPcaConfig {
  std::size_t k = 1;
  double epsilon = 0.5;
  double lambda = 1.0;
  double delta = 0.01;   // sketch failure probability
  double pcp_constant = 4.0;
  /// CountSketch width override for the fast Gaussian product; unset means
  /// the total-variation default (exact product at desk scale).
  std::optional<std::size_t> sketch_inner_dim;
};

struct KernelPcaResult {
  DenseMatrix q;        // n x k orthonormal
  std::size_t s = 0;    // frequencies sampled
  double lambda = 0;
  double feature_stage_ms = 0;  // sketch + feature evaluation
  double lra_stage_ms = 0;
};

/// Global minimizer of ||A Y B - C||_F over rank-k Y:
/// Y = A^+ [P_A C P_B]_k B^+ with P_A, P_B the orthogonal projections onto
/// the column space of A and row space of B.
DenseMatrix rank_constrained_regression(const DenseMatrix& c,
                                        const DenseMatrix& a,
                                        const DenseMatrix& b, std::size_t k);

/// Sketched low-rank approximation of A A^T: returns a factor pair
/// (N1, N2), each n x k, with ||A A^T - N1 N2^T||_F^2 <= (1+eps) opt^2 with
/// the configured probability. A A^T is never materialized on the sketch
/// path; products run as A (A^T X).
LowRankFactor gram_lra(const SparseMatrix& a, const GramLraConfig& config,
                       SeededRng& rng);

/// Orthonormal Q (n x k) with ||Q Q^T M - M||_F^2 <= (1+eps) ||M - M_k||_F^2
/// with high probability (sketch-project-solve). exact = true computes the
/// top-k left singular vectors instead and ignores eps.
DenseMatrix input_sparsity_lra(const DenseMatrix& m, std::size_t k,
                               double epsilon, SeededRng& rng,
                               bool exact = false);

/// Kernel PCA through the random Fourier feature sketch: sample s
/// frequencies, build the feature matrix, and run input_sparsity_lra on it.
KernelPcaResult kernel_pca(const SparseMatrix& a, const KernelSpec& spec,
                           const KernelPcaConfig& config, SeededRng& rng);

/// ||K - reconstruct(approx)||_F^2 / ||K - K_k||_F^2, with the conventions
/// 1 when both terms vanish and +inf when only the denominator does.
double relative_lra_error(const DenseMatrix& k, const LowRankFactor& approx);

}  // namespace klra::lowrank
