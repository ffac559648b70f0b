#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>

#include "klra/matrix.hpp"
#include "klra/sparse.hpp"

namespace klra {

class SeededRng;

/// Kernel identity plus the power-series metadata the reduction gadgets and
/// the Fourier sampler need. Built-in kinds:
///   linear      psi(x,y) = x.y
///   polynomial  psi(x,y) = (c + x.y)^q,       series in x.y
///   gaussian    psi(x,y) = exp(-|x-y|^2/sigma), series in |x-y|^2
/// Custom shift-invariant kernels carry a user radial profile and norm
/// sampler but no series metadata, so they cannot drive the gadget builders.
class KernelSpec {
 public:
  enum class Kind { linear, polynomial, gaussian, custom_shift_invariant };

  static KernelSpec linear();
  static KernelSpec polynomial(double c, int q);
  static KernelSpec gaussian(double sigma);
  /// profile: f with psi(x,y) = f(|x-y|^2); norm_sampler: draw from the
  /// distribution of frequency norms under the kernel's Fourier density.
  static KernelSpec custom_shift_invariant(
      std::function<double(double)> profile,
      std::function<double(SeededRng&)> norm_sampler, std::string name);

  Kind kind() const { return kind_; }
  double poly_c() const { return c_; }
  int poly_q() const { return q_; }
  double sigma() const { return sigma_; }
  const std::string& name() const { return name_; }

  bool has_series() const {
    return kind_ == Kind::linear || kind_ == Kind::polynomial ||
           kind_ == Kind::gaussian;
  }
  /// True when psi is a function of the dot product x.y.
  bool is_dot_product() const {
    return kind_ == Kind::linear || kind_ == Kind::polynomial;
  }
  /// True when psi is a function of the squared distance |x-y|^2.
  bool is_distance() const {
    return kind_ == Kind::gaussian || kind_ == Kind::custom_shift_invariant;
  }

  double series_c0() const { return series_coeff(0); }
  double series_c1() const { return series_coeff(1); }

  /// Coefficient c_q of the expansion f(x) = sum_q c_q x^q, where x is the
  /// dot product (linear, polynomial) or squared distance (gaussian).
  double series_coeff(int q) const;

  /// Growth bound G >= 1 with |c_q/c_1| <= G^(q-1): q/c for polynomial,
  /// 1/sigma for gaussian, clamped up to 1 when the natural value is below.
  double growth_bound() const;

  /// Scalar kernel value as a function of the dot product (dot kinds only).
  template <typename T>
  T value_from_dot(T dot) const {
    switch (kind_) {
      case Kind::linear:
        return dot;
      case Kind::polynomial: {
        T base = T(c_) + dot;
        T acc(1);
        for (int i = 0; i < q_; ++i) acc *= base;
        return acc;
      }
      default:
        throw std::invalid_argument(
            "value_from_dot: kernel is not a dot-product kernel");
    }
  }

  /// Scalar kernel value as a function of the squared distance.
  template <typename T>
  T value_from_sqdist(T sqdist) const {
    using std::exp;
    switch (kind_) {
      case Kind::gaussian:
        return exp(-sqdist / T(sigma_));
      case Kind::custom_shift_invariant:
        if constexpr (std::is_same_v<T, double>) {
          return profile_(sqdist);
        } else {
          throw std::invalid_argument(
              "value_from_sqdist: custom kernels are double-only");
        }
      default:
        throw std::invalid_argument(
            "value_from_sqdist: kernel is not a distance kernel");
    }
  }

  const std::function<double(SeededRng&)>& norm_sampler() const {
    return norm_sampler_;
  }

 private:
  KernelSpec() = default;

  Kind kind_ = Kind::linear;
  double c_ = 0;
  int q_ = 1;
  double sigma_ = 1;
  std::string name_ = "linear";
  std::function<double(double)> profile_;
  std::function<double(SeededRng&)> norm_sampler_;
};

/// Kernel matrix together with the spec that generated it.
struct KernelMatrix {
  DenseMatrix entries;
  KernelSpec spec;
  std::size_t n() const { return entries.rows(); }
};

double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y);

KernelMatrix kernel_matrix(const KernelSpec& spec, const DenseMatrix& points);
KernelMatrix kernel_matrix(const KernelSpec& spec, const SparseMatrix& points);

/// (1/k) * sum_{i>k} sigma_i(K): the largest ridge parameter admissible for
/// a rank-k projection-cost preserving sketch. Exact eigendecomposition;
/// a desk-scale validation utility.
double spectral_tail_threshold(const KernelMatrix& k, std::size_t rank);
double spectral_tail_threshold(const DenseMatrix& k, std::size_t rank);

}  // namespace klra
