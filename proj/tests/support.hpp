#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "klra/matrix.hpp"
#include "klra/rng.hpp"
#include "klra/sparse.hpp"
#include "klra/spectral.hpp"

namespace test_support {

using klra::DenseMatrix;
using klra::SparseMatrix;

/// Naive triple-loop A A^T oracle.
inline DenseMatrix naive_gram(const DenseMatrix& a) {
  DenseMatrix g(a.rows(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.rows(); ++j)
      for (std::size_t t = 0; t < a.cols(); ++t)
        g(i, j) += a(i, t) * a(j, t);
  return g;
}

/// Naive integer matrix product (entries assumed integral).
inline DenseMatrix naive_multiply(const DenseMatrix& a, const DenseMatrix& c) {
  DenseMatrix out(a.rows(), c.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j) {
      long long acc = 0;
      for (std::size_t t = 0; t < a.cols(); ++t)
        acc += static_cast<long long>(a(i, t)) *
               static_cast<long long>(c(t, j));
      out(i, j) = static_cast<double>(acc);
    }
  return out;
}

inline DenseMatrix random_dense(std::size_t rows, std::size_t cols,
                                klra::SeededRng& rng, double scale = 1.0) {
  DenseMatrix m(rows, cols);
  for (auto& v : m.data()) v = scale * rng.normal();
  return m;
}

inline DenseMatrix random_integer(std::size_t rows, std::size_t cols,
                                  int bound, klra::SeededRng& rng) {
  DenseMatrix m(rows, cols);
  for (auto& v : m.data())
    v = static_cast<double>(
        static_cast<long long>(rng.below(2 * bound + 1)) - bound);
  return m;
}

inline SparseMatrix random_sparse(std::size_t rows, std::size_t cols,
                                  double density, klra::SeededRng& rng,
                                  double scale = 1.0) {
  std::vector<klra::Triplet> trips;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      if (rng.uniform01() < density)
        trips.push_back({i, j, scale * rng.normal()});
  return SparseMatrix::from_triplets(rows, cols, std::move(trips));
}

inline DenseMatrix random_orthonormal(std::size_t rows, std::size_t cols,
                                      klra::SeededRng& rng) {
  return klra::orthonormal_columns(random_dense(rows, cols, rng));
}

/// Kolmogorov-Smirnov statistic of a sample against a CDF.
template <typename Cdf>
double ks_statistic(std::vector<double> sample, Cdf&& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double worst = 0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    worst = std::max(worst, std::fabs(f - static_cast<double>(i) / n));
    worst = std::max(worst, std::fabs(static_cast<double>(i + 1) / n - f));
  }
  return worst;
}

inline double standard_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

/// Alternating least squares oracle for min ||A (U V^T) B - C||_F over
/// rank-k factors, restarted from random initializations; returns the best
/// residual found. Independent of the closed-form solver it checks.
inline double als_rank_constrained_residual(const DenseMatrix& c,
                                            const DenseMatrix& a,
                                            const DenseMatrix& b,
                                            std::size_t k, int restarts,
                                            klra::SeededRng& rng) {
  using klra::matmul;
  using klra::matmul_nt;
  using klra::transpose;
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    DenseMatrix u = random_dense(a.cols(), k, rng);
    DenseMatrix v = random_dense(b.rows(), k, rng);
    double prev = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 400; ++iter) {
      // Fix V: min over U of ||(A U)(V^T B) - C||; vectorizes to a least
      // squares with coefficient (A (x) (V^T B)^T) -- solved via the normal
      // equations on the small k x k system per side.
      DenseMatrix vb = matmul_tn(v, b);             // k x q
      DenseMatrix au = matmul(a, u);                // p x k
      // U step: A U (V^T B) ~ C  =>  U = A^+ C (V^T B)^+
      u = matmul(klra::least_squares(a, c),
                 klra::pseudo_inverse(vb));
      au = matmul(a, u);
      // V step: (A U) V^T B ~ C  =>  V^T = (A U)^+ C B^+
      DenseMatrix vt = matmul(klra::least_squares(au, c),
                              klra::pseudo_inverse(b));
      v = transpose(vt);
      const double resid =
          klra::frobenius_norm(matmul(matmul(a, matmul_nt(u, v)), b) - c);
      if (std::fabs(prev - resid) < 1e-12 * std::max(1.0, resid)) {
        prev = resid;
        break;
      }
      prev = resid;
    }
    best = std::min(best, prev);
  }
  return best;
}

}  // namespace test_support
