#include "klra/rff.hpp"

#include <cmath>
#include <stdexcept>

#include "klra/factor.hpp"
#include "klra/spectral.hpp"

namespace klra::rff {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

RadialDensity RadialDensity::for_kernel(const KernelSpec& spec) {
  if (spec.kind() == KernelSpec::Kind::gaussian) {
    RadialDensity d;
    d.spec = spec;
    d.coord_variance = 1.0 / (2.0 * kPi * kPi * spec.sigma());
    return d;
  }
  if (spec.kind() == KernelSpec::Kind::custom_shift_invariant) {
    if (!spec.norm_sampler())
      throw std::invalid_argument(
          "RadialDensity: custom kernel has no norm sampler");
    RadialDensity d;
    d.spec = spec;
    return d;
  }
  throw std::invalid_argument(
      "RadialDensity: kernel is not shift/rotation invariant");
}

double RadialDensity::density(std::span<const double> eta) const {
  if (!has_closed_form())
    throw std::invalid_argument(
        "RadialDensity: no closed-form density registered for this kernel");
  const double v = coord_variance;
  double sq = 0;
  for (double e : eta) sq += e * e;
  const double d = static_cast<double>(eta.size());
  return std::pow(2.0 * kPi * v, -d / 2.0) * std::exp(-sq / (2.0 * v));
}

double RadialDensity::sample_norm(std::size_t dim, SeededRng& rng) const {
  if (spec.kind() == KernelSpec::Kind::custom_shift_invariant)
    return spec.norm_sampler()(rng);
  // Norm of a fresh N(0, v I_d) draw: exact in distribution, no
  // special-function inversion needed.
  const double sd = std::sqrt(coord_variance);
  double sq = 0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double g = sd * rng.normal();
    sq += g * g;
  }
  return std::sqrt(sq);
}

double fourier_density_check(const KernelSpec& spec, std::size_t d,
                             const std::vector<double>& delta_grid) {
  RadialDensity density = RadialDensity::for_kernel(spec);
  if (!density.has_closed_form())
    throw std::invalid_argument(
        "fourier_density_check: kernel has no registered density");
  (void)d;  // the first-coordinate marginal is the same for every d
  const double v = density.coord_variance;
  const double sd = std::sqrt(v);

  // Simpson quadrature of cos(2 pi eta delta) N(0, v)(eta) over [-L, L].
  const double limit = 14.0 * sd;
  const std::size_t points = 4001;  // odd
  const double h = 2.0 * limit / static_cast<double>(points - 1);
  double worst = 0;
  for (double delta : delta_grid) {
    double acc = 0;
    for (std::size_t i = 0; i < points; ++i) {
      const double eta = -limit + h * static_cast<double>(i);
      const double f = std::cos(kTwoPi * eta * delta) *
                       std::exp(-eta * eta / (2.0 * v)) /
                       std::sqrt(2.0 * kPi * v);
      const double w = (i == 0 || i == points - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      acc += w * f;
    }
    acc *= h / 3.0;
    const double want = spec.value_from_sqdist(delta * delta);
    worst = std::max(worst, std::fabs(acc - want));
  }
  return worst;
}

FrequencySample sample_frequencies(const RadialDensity& density,
                                   std::size_t d, std::size_t s,
                                   SeededRng& rng) {
  if (s < 1)
    throw std::invalid_argument("sample_frequencies: s must be >= 1");
  FrequencySample out;
  out.dim = d;
  out.count = s;
  out.frequencies = DenseMatrix(s, d);
  std::vector<double> g(d);
  for (std::size_t m = 0; m < s; ++m) {
    double norm_sq = 0;
    for (std::size_t i = 0; i < d; ++i) {
      g[i] = rng.normal();
      norm_sq += g[i] * g[i];
    }
    const double target = density.sample_norm(d, rng);
    const double scale = norm_sq > 0 ? target / std::sqrt(norm_sq) : 0.0;
    for (std::size_t i = 0; i < d; ++i)
      out.frequencies(m, i) = g[i] * scale;
  }
  return out;
}

FeatureMatrix feature_matrix_from_dots(const DenseMatrix& dots) {
  FeatureMatrix out;
  out.n = dots.rows();
  out.s = dots.cols();
  out.entries = DenseMatrix(out.n, 2 * out.s);
  const double scale = 1.0 / std::sqrt(static_cast<double>(out.s));
  for (std::size_t i = 0; i < out.n; ++i) {
    const double* di = dots.row_ptr(i);
    double* zi = out.entries.row_ptr(i);
    for (std::size_t m = 0; m < out.s; ++m) {
      const double phase = kTwoPi * di[m];
      zi[2 * m] = std::cos(phase) * scale;
      zi[2 * m + 1] = std::sin(phase) * scale;
    }
  }
  return out;
}

FeatureMatrix feature_matrix(const SparseMatrix& a,
                             const FrequencySample& freqs) {
  if (a.cols() != freqs.dim)
    throw std::invalid_argument("feature_matrix: dimension mismatch");
  DenseMatrix dots(a.rows(), freqs.count);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* di = dots.row_ptr(i);
    for (std::size_t k = a.row_begin(i); k < a.row_end(i); ++k) {
      const double v = a.values()[k];
      const std::size_t col = a.col_indices()[k];
      for (std::size_t m = 0; m < freqs.count; ++m)
        di[m] += v * freqs.frequencies(m, col);
    }
  }
  return feature_matrix_from_dots(dots);
}

FeatureMatrix feature_matrix(const DenseMatrix& a,
                             const FrequencySample& freqs) {
  if (a.cols() != freqs.dim)
    throw std::invalid_argument("feature_matrix: dimension mismatch");
  DenseMatrix dots = matmul_nt(a, freqs.frequencies);
  return feature_matrix_from_dots(dots);
}

RidgeLeverage::RidgeLeverage(const KernelSpec& spec, DenseMatrix points,
                             const KernelMatrix& k, double lambda)
    : density_(RadialDensity::for_kernel(spec)),
      points_(std::move(points)),
      lambda_(lambda) {
  if (!(lambda > 0))
    throw std::invalid_argument("RidgeLeverage: lambda must be positive");
  if (k.entries.rows() != points_.rows())
    throw std::invalid_argument("RidgeLeverage: K and points disagree on n");
  SymmetricEig<double> eig = symmetric_eig(k.entries);
  eig_values_ = std::move(eig.values);
  for (double& v : eig_values_) v = std::max(0.0, v);
  eig_vectors_ = std::move(eig.vectors);
}

double RidgeLeverage::operator()(std::span<const double> eta) const {
  return density_.density(eta) * quadratic_form(eta);
}

double RidgeLeverage::quadratic_form(std::span<const double> eta) const {
  const std::size_t n = points_.rows();
  if (eta.size() != points_.cols())
    throw std::invalid_argument("RidgeLeverage: eta dimension mismatch");
  // z_j = exp(-2 pi i eta.a_j); the quadratic form splits into the real and
  // imaginary parts, both run through the cached eigenbasis.
  std::vector<double> re(n), im(n);
  for (std::size_t j = 0; j < n; ++j) {
    double phase = 0;
    for (std::size_t t = 0; t < points_.cols(); ++t)
      phase += eta[t] * points_(j, t);
    phase *= kTwoPi;
    re[j] = std::cos(phase);
    im[j] = -std::sin(phase);
  }
  double acc = 0;
  for (std::size_t r = 0; r < n; ++r) {
    double dre = 0, dim = 0;
    for (std::size_t j = 0; j < n; ++j) {
      dre += eig_vectors_(j, r) * re[j];
      dim += eig_vectors_(j, r) * im[j];
    }
    acc += (dre * dre + dim * dim) / (eig_values_[r] + lambda_);
  }
  return acc;
}

double ridge_leverage(const KernelSpec& spec, const DenseMatrix& points,
                      const KernelMatrix& k, double lambda,
                      std::span<const double> eta) {
  return RidgeLeverage(spec, points, k, lambda)(eta);
}

std::size_t pcp_sample_size(std::size_t n, double lambda, double epsilon,
                            double delta, double c) {
  if (!(lambda > 0) || !(epsilon > 0) || !(delta > 0))
    throw std::invalid_argument(
        "pcp_sample_size: lambda, epsilon, delta must be positive");
  const double raw = c * static_cast<double>(n) *
                     std::log(static_cast<double>(n) / (delta * lambda)) /
                     (epsilon * epsilon * lambda);
  if (!(raw > 1.0)) return 1;
  return static_cast<std::size_t>(std::ceil(raw));
}

PcpCheckResult pcp_check(const KernelMatrix& k, const FeatureMatrix& z,
                         const DenseMatrix& q, double epsilon) {
  if (z.n != k.n())
    throw std::invalid_argument("pcp_check: feature matrix row mismatch");
  if (q.rows() != k.n() && !(q.rows() == 0 && q.cols() == 0))
    throw std::invalid_argument("pcp_check: basis row mismatch");

  PcpCheckResult out;
  out.true_cost = q.cols() == 0 ? trace(k.entries)
                                : projection_cost(k.entries, q);
  double z_fro_sq = frobenius_norm_sq(z.entries);
  if (q.cols() == 0) {
    out.sketch_cost = z_fro_sq;
  } else {
    DenseMatrix qtz = matmul_tn(q, z.entries);
    out.sketch_cost = std::max(0.0, z_fro_sq - frobenius_norm_sq(qtz));
  }
  const double slack = 1e-9 * std::max(1.0, out.sketch_cost);
  out.holds = (1.0 - epsilon) * out.sketch_cost <= out.true_cost + slack &&
              out.true_cost <= (1.0 + epsilon) * out.sketch_cost + slack;
  return out;
}

}  // namespace klra::rff
