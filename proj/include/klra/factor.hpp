#pragma once

#include <cstddef>
#include <stdexcept>

#include "klra/matrix.hpp"
#include "klra/spectral.hpp"

namespace klra {

/// A factored low-rank approximation. Three shapes occur in this library:
///  - symmetric_factor: a single N, approximating a PSD matrix by N N^T;
///  - pair: (N1, N2), approximating M by N1 N2^T;
///  - orthonormal: a basis Q, approximating M by Q Q^T M.
class LowRankFactor {
 public:
  enum class Kind { symmetric_factor, pair, orthonormal };

  static LowRankFactor symmetric(DenseMatrix n, std::size_t rank) {
    return LowRankFactor(Kind::symmetric_factor, std::move(n), DenseMatrix(),
                         rank);
  }
  static LowRankFactor factor_pair(DenseMatrix n1, DenseMatrix n2,
                                   std::size_t rank) {
    if (n1.cols() != n2.cols())
      throw std::invalid_argument("LowRankFactor: factor width mismatch");
    return LowRankFactor(Kind::pair, std::move(n1), std::move(n2), rank);
  }
  static LowRankFactor orthonormal_basis(DenseMatrix q) {
    const std::size_t rank = q.cols();
    check_orthonormal(q);
    return LowRankFactor(Kind::orthonormal, std::move(q), DenseMatrix(), rank);
  }

  Kind kind() const { return kind_; }
  std::size_t rank() const { return rank_; }
  const DenseMatrix& left() const { return left_; }
  const DenseMatrix& right() const { return right_; }
  const DenseMatrix& basis() const { return left_; }

  /// Materialize the approximation. The orthonormal kind projects a target,
  /// which must be supplied.
  DenseMatrix reconstruct(const DenseMatrix* target = nullptr) const {
    switch (kind_) {
      case Kind::symmetric_factor:
        return matmul_nt(left_, left_);
      case Kind::pair:
        return matmul_nt(left_, right_);
      case Kind::orthonormal: {
        if (target == nullptr)
          throw std::invalid_argument(
              "LowRankFactor: orthonormal kind needs a target to project");
        DenseMatrix qtm = matmul_tn(left_, *target);
        return matmul(left_, qtm);
      }
    }
    throw std::logic_error("LowRankFactor: unknown kind");
  }

 private:
  LowRankFactor(Kind kind, DenseMatrix l, DenseMatrix r, std::size_t rank)
      : kind_(kind), rank_(rank), left_(std::move(l)), right_(std::move(r)) {}

  static void check_orthonormal(const DenseMatrix& q) {
    DenseMatrix g = matmul_tn(q, q);
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < g.cols(); ++j) {
        const double want = i == j ? 1.0 : 0.0;
        if (std::fabs(g(i, j) - want) > 1e-10)
          throw std::invalid_argument(
              "LowRankFactor: basis is not orthonormal within 1e-10");
      }
  }

  Kind kind_;
  std::size_t rank_;
  DenseMatrix left_;
  DenseMatrix right_;
};

/// Best rank-k approximation by truncated SVD, returned as the factor pair
/// (U_k diag(sigma_k), V_k).
inline LowRankFactor best_rank_k(const DenseMatrix& m, std::size_t k) {
  const std::size_t maxk = std::min(m.rows(), m.cols());
  if (k < 1 || k > maxk)
    throw std::invalid_argument("best_rank_k: rank out of range");
  Svd<double> s = jacobi_svd(m);
  DenseMatrix l(m.rows(), k), r(m.cols(), k);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < m.rows(); ++i) l(i, j) = s.u(i, j) * s.sigma[j];
    for (std::size_t i = 0; i < m.cols(); ++i) r(i, j) = s.v(i, j);
  }
  return LowRankFactor::factor_pair(std::move(l), std::move(r), k);
}

/// ||Phi - Q Q^T Phi||_F^2 for any Phi with Phi Phi^T = K, computed as
/// trace(K) - trace(Q^T K Q) without materializing Phi. K must be PSD up to
/// floating-point noise; the result is clamped at zero.
inline double projection_cost(const DenseMatrix& k, const DenseMatrix& q) {
  if (k.rows() != k.cols())
    throw std::invalid_argument("projection_cost: K must be square");
  if (q.rows() != k.rows())
    throw std::invalid_argument("projection_cost: Q row count mismatch");
  double total = trace(k);
  DenseMatrix kq = matmul(k, q);
  double captured = 0;
  for (std::size_t i = 0; i < q.rows(); ++i)
    for (std::size_t j = 0; j < q.cols(); ++j) captured += q(i, j) * kq(i, j);
  return std::max(0.0, total - captured);
}

inline double projection_cost(const DenseMatrix& k, const LowRankFactor& q) {
  if (q.kind() != LowRankFactor::Kind::orthonormal)
    throw std::invalid_argument("projection_cost: factor must be orthonormal");
  return projection_cost(k, q.basis());
}

}  // namespace klra
