#include "klra/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "klra/spectral.hpp"

namespace klra {

KernelSpec KernelSpec::linear() {
  KernelSpec s;
  s.kind_ = Kind::linear;
  s.name_ = "linear";
  return s;
}

KernelSpec KernelSpec::polynomial(double c, int q) {
  if (c < 0) throw std::invalid_argument("polynomial kernel: c must be >= 0");
  if (q < 1) throw std::invalid_argument("polynomial kernel: q must be >= 1");
  if (c == 0 && q > 1)
    throw std::invalid_argument(
        "polynomial kernel: c = 0 with q > 1 has vanishing linear "
        "coefficient; the series metadata would be degenerate");
  KernelSpec s;
  s.kind_ = Kind::polynomial;
  s.c_ = c;
  s.q_ = q;
  s.name_ = "polynomial";
  return s;
}

KernelSpec KernelSpec::gaussian(double sigma) {
  if (!(sigma > 0))
    throw std::invalid_argument("gaussian kernel: sigma must be positive");
  KernelSpec s;
  s.kind_ = Kind::gaussian;
  s.sigma_ = sigma;
  s.name_ = "gaussian";
  return s;
}

KernelSpec KernelSpec::custom_shift_invariant(
    std::function<double(double)> profile,
    std::function<double(SeededRng&)> norm_sampler, std::string name) {
  if (!profile)
    throw std::invalid_argument("custom kernel: profile is required");
  KernelSpec s;
  s.kind_ = Kind::custom_shift_invariant;
  s.profile_ = std::move(profile);
  s.norm_sampler_ = std::move(norm_sampler);
  s.name_ = std::move(name);
  return s;
}

double KernelSpec::series_coeff(int q) const {
  if (q < 0) throw std::invalid_argument("series_coeff: q must be >= 0");
  switch (kind_) {
    case Kind::linear:
      return q == 1 ? 1.0 : 0.0;
    case Kind::polynomial: {
      if (q > q_) return 0.0;
      // (c + x)^q_ has coefficient c^(q_-q) * binom(q_, q) at x^q.
      double binom = 1.0;
      for (int i = 1; i <= q; ++i)
        binom = binom * static_cast<double>(q_ - i + 1) / i;
      return std::pow(c_, q_ - q) * binom;
    }
    case Kind::gaussian: {
      // exp(-x/sigma) = sum_q (-1/sigma)^q / q! * x^q
      double coeff = 1.0;
      for (int i = 1; i <= q; ++i) coeff *= (-1.0 / sigma_) / i;
      return coeff;
    }
    case Kind::custom_shift_invariant:
      throw std::invalid_argument(
          "series_coeff: custom kernels carry no series metadata");
  }
  throw std::logic_error("series_coeff: unknown kind");
}

double KernelSpec::growth_bound() const {
  switch (kind_) {
    case Kind::linear:
      return 1.0;
    case Kind::polynomial:
      return std::max(1.0, static_cast<double>(q_) / c_);
    case Kind::gaussian:
      return std::max(1.0, 1.0 / sigma_);
    case Kind::custom_shift_invariant:
      throw std::invalid_argument(
          "growth_bound: custom kernels carry no series metadata");
  }
  throw std::logic_error("growth_bound: unknown kind");
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("kernel_eval: dimension mismatch");
  if (spec.is_dot_product()) {
    double dot = 0;
    for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
    return spec.value_from_dot(dot);
  }
  double sqdist = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    sqdist += d * d;
  }
  return spec.value_from_sqdist(sqdist);
}

namespace {

template <typename RowDot, typename RowSqNorm>
DenseMatrix kernel_matrix_impl(const KernelSpec& spec, std::size_t n,
                               RowDot&& row_dot, RowSqNorm&& row_sqnorm) {
  DenseMatrix k(n, n);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = row_sqnorm(i);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double v;
      if (spec.is_dot_product()) {
        v = spec.value_from_dot(i == j ? sq[i] : row_dot(i, j));
      } else {
        const double d =
            i == j ? 0.0 : std::max(0.0, sq[i] + sq[j] - 2.0 * row_dot(i, j));
        v = spec.value_from_sqdist(d);
      }
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

}  // namespace

KernelMatrix kernel_matrix(const KernelSpec& spec, const DenseMatrix& a) {
  auto dot = [&](std::size_t i, std::size_t j) {
    double acc = 0;
    for (std::size_t t = 0; t < a.cols(); ++t) acc += a(i, t) * a(j, t);
    return acc;
  };
  auto sq = [&](std::size_t i) { return dot(i, i); };
  return KernelMatrix{kernel_matrix_impl(spec, a.rows(), dot, sq), spec};
}

KernelMatrix kernel_matrix(const KernelSpec& spec, const SparseMatrix& a) {
  auto dot = [&](std::size_t i, std::size_t j) { return a.row_dot(i, j); };
  auto sq = [&](std::size_t i) { return a.row_norm_sq(i); };
  return KernelMatrix{kernel_matrix_impl(spec, a.rows(), dot, sq), spec};
}

double spectral_tail_threshold(const DenseMatrix& k, std::size_t rank) {
  if (rank < 1 || rank >= k.rows())
    throw std::invalid_argument(
        "spectral_tail_threshold: need 1 <= k < n");
  SymmetricEig<double> eig = symmetric_eig(k);
  double tail = 0;
  for (std::size_t i = rank; i < eig.values.size(); ++i)
    tail += std::max(0.0, eig.values[i]);  // PSD up to fp noise
  return tail / static_cast<double>(rank);
}

double spectral_tail_threshold(const KernelMatrix& k, std::size_t rank) {
  return spectral_tail_threshold(k.entries, rank);
}

}  // namespace klra
