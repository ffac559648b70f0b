#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "klra/kernels.hpp"
#include "klra/matrix.hpp"
#include "klra/rng.hpp"
#include "klra/sparse.hpp"

namespace klra::rff {

/// Fourier frequency distribution of a shift- and rotation-invariant kernel,
/// split into a Gaussian direction and a norm law. For the gaussian kernel
/// with psi(delta) = exp(-|delta|^2/sigma) the density is the product normal
/// with per-coordinate variance 1/(2 pi^2 sigma).
struct RadialDensity {
  KernelSpec spec = KernelSpec::linear();
  double coord_variance = 0;  // gaussian kind only

  static RadialDensity for_kernel(const KernelSpec& spec);

  bool has_closed_form() const {
    return spec.kind() == KernelSpec::Kind::gaussian;
  }

  /// Density value p(eta) of the d-dimensional frequency distribution.
  double density(std::span<const double> eta) const;

  /// One draw from the norm distribution p-hat.
  double sample_norm(std::size_t dim, SeededRng& rng) const;
};

struct FrequencySample {
  std::size_t dim = 0;
  std::size_t count = 0;
  DenseMatrix frequencies;  // count x dim, one frequency per row
  double lambda = 0;        // ridge parameter of the consuming sketch
  double epsilon = 0;
  double delta = 0;
};

/// The scaled random Fourier feature matrix: n x 2s with column pair
/// (cos(2 pi eta_m . a_j), sin(2 pi eta_m . a_j)) / sqrt(s) per frequency.
/// Every row has unit norm by construction.
struct FeatureMatrix {
  std::size_t n = 0;
  std::size_t s = 0;
  DenseMatrix entries;  // n x 2s
};

/// Numerically verify that the registered Fourier density inverts back to
/// the kernel: max over the grid of |integral(cos(2 pi eta delta) p1(eta))
/// - psi(delta)| where p1 is the first-coordinate marginal. Rotation
/// invariance makes the one-dimensional marginal sufficient for any d.
double fourier_density_check(const KernelSpec& spec, std::size_t d,
                             const std::vector<double>& delta_grid);

/// s frequencies eta_i = g_i * (m_i / |g_i|) with Gaussian directions g_i
/// and norms m_i drawn from p-hat.
FrequencySample sample_frequencies(const RadialDensity& density,
                                   std::size_t d, std::size_t s,
                                   SeededRng& rng);

/// Build the feature matrix from explicit frequencies, or from precomputed
/// dot products a_j . eta_m (n x s) as produced by the sketched Gaussian
/// product path.
FeatureMatrix feature_matrix(const SparseMatrix& a,
                             const FrequencySample& freqs);
FeatureMatrix feature_matrix(const DenseMatrix& a,
                             const FrequencySample& freqs);
FeatureMatrix feature_matrix_from_dots(const DenseMatrix& dots);

/// Ridge leverage function tau_lambda(eta) =
/// p(eta) z(eta)^* (K + lambda I)^{-1} z(eta) with z(eta)_j =
/// exp(-2 pi i eta . a_j). The evaluator caches the eigendecomposition of K.
class RidgeLeverage {
 public:
  RidgeLeverage(const KernelSpec& spec, DenseMatrix points,
                const KernelMatrix& k, double lambda);

  double operator()(std::span<const double> eta) const;

  /// The density-normalized form z(eta)^* (K + lambda I)^{-1} z(eta),
  /// bounded by n/lambda for every eta (|z_j| = 1). The full tau adds the
  /// p(eta) factor, which can exceed n/lambda when the density tops 1.
  double quadratic_form(std::span<const double> eta) const;

  double lambda() const { return lambda_; }

 private:
  RadialDensity density_;
  DenseMatrix points_;             // n x d
  std::vector<double> eig_values_; // clamped at 0
  DenseMatrix eig_vectors_;
  double lambda_;
};

double ridge_leverage(const KernelSpec& spec, const DenseMatrix& points,
                      const KernelMatrix& k, double lambda,
                      std::span<const double> eta);

/// Sample count of the projection-cost preserving sketch:
/// ceil(c n ln(n/(delta lambda)) / (eps^2 lambda)), floored at 1.
std::size_t pcp_sample_size(std::size_t n, double lambda, double epsilon,
                            double delta, double c);

struct PcpCheckResult {
  bool holds = false;
  double sketch_cost = 0;  // ||Q Q^T Ztilde - Ztilde||_F^2
  double true_cost = 0;    // ||Q Q^T Phi - Phi||_F^2 via projection_cost(K,Q)
};

/// Evaluate the two-sided projection-cost sandwich
/// (1-eps) sketch <= true <= (1+eps) sketch.
PcpCheckResult pcp_check(const KernelMatrix& k, const FeatureMatrix& z,
                         const DenseMatrix& q, double epsilon);

}  // namespace klra::rff
