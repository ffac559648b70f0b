#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "klra/matrix.hpp"

namespace klra {

template <typename T>
struct SymmetricEig {
  std::vector<T> values;  // descending
  Mat<T> vectors;         // orthonormal columns, vectors.col(i) <-> values[i]
};

template <typename T>
struct Svd {
  Mat<T> u;               // thin left factor
  std::vector<T> sigma;   // descending, nonnegative
  Mat<T> v;               // thin right factor
};

namespace detail {

template <typename T>
T off_diag_norm_sq(const Mat<T>& k) {
  T acc(0);
  for (std::size_t i = 0; i < k.rows(); ++i)
    for (std::size_t j = i + 1; j < k.cols(); ++j) acc += k(i, j) * k(i, j);
  return acc + acc;
}

}  // namespace detail

/// Eigendecomposition of a symmetric matrix by the cyclic Jacobi method.
/// The input is symmetrized as (K + K^T)/2 before iterating. Accurate and
/// scalar-generic; cubic per sweep, which is the right trade at the matrix
/// sizes this library targets.
template <typename T>
SymmetricEig<T> symmetric_eig(const Mat<T>& input) {
  using std::abs;
  using std::sqrt;
  if (input.rows() != input.cols())
    throw std::invalid_argument("symmetric_eig: matrix must be square");
  const std::size_t n = input.rows();

  Mat<T> k(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      k(i, j) = (input(i, j) + input(j, i)) / T(2);
  Mat<T> v = Mat<T>::identity(n);

  const T eps = std::numeric_limits<T>::epsilon();
  const T norm = frobenius_norm(k);
  const T tol_sq = (eps * norm) * (eps * norm) * T(n == 0 ? 1 : n);

  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (detail::off_diag_norm_sq(k) <= tol_sq) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const T apq = k(p, q);
        if (abs(apq) <= eps * (abs(k(p, p)) + abs(k(q, q))) * T(0.5) &&
            abs(apq) <= eps * norm)
          continue;
        const T theta = (k(q, q) - k(p, p)) / (T(2) * apq);
        T t;
        if (theta >= T(0))
          t = T(1) / (theta + sqrt(T(1) + theta * theta));
        else
          t = T(-1) / (-theta + sqrt(T(1) + theta * theta));
        const T c = T(1) / sqrt(T(1) + t * t);
        const T s = t * c;

        const T kpp = k(p, p), kqq = k(q, q);
        k(p, p) = kpp - t * apq;
        k(q, q) = kqq + t * apq;
        k(p, q) = T(0);
        k(q, p) = T(0);
        for (std::size_t r = 0; r < n; ++r) {
          if (r != p && r != q) {
            const T krp = k(r, p), krq = k(r, q);
            k(r, p) = c * krp - s * krq;
            k(p, r) = k(r, p);
            k(r, q) = s * krp + c * krq;
            k(q, r) = k(r, q);
          }
          const T vrp = v(r, p), vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return k(a, a) > k(b, b); });

  SymmetricEig<T> out;
  out.values.resize(n);
  out.vectors = Mat<T>(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = k(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

/// Thin SVD via one-sided (Hestenes) Jacobi rotations on the tall
/// orientation. Columns of zero norm yield sigma = 0 with a zero U column.
template <typename T>
Svd<T> jacobi_svd(const Mat<T>& input) {
  using std::abs;
  using std::sqrt;
  const bool transposed = input.rows() < input.cols();
  Mat<T> w = transposed ? transpose(input) : input;
  const std::size_t m = w.rows(), n = w.cols();
  Mat<T> v = Mat<T>::identity(n);

  const T eps = std::numeric_limits<T>::epsilon();
  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        T alpha(0), beta(0), gamma(0);
        for (std::size_t i = 0; i < m; ++i) {
          alpha += w(i, p) * w(i, p);
          beta += w(i, q) * w(i, q);
          gamma += w(i, p) * w(i, q);
        }
        if (abs(gamma) <= eps * sqrt(alpha * beta) || gamma == T(0)) continue;
        rotated = true;
        const T zeta = (beta - alpha) / (T(2) * gamma);
        T t;
        if (zeta >= T(0))
          t = T(1) / (zeta + sqrt(T(1) + zeta * zeta));
        else
          t = T(-1) / (-zeta + sqrt(T(1) + zeta * zeta));
        const T c = T(1) / sqrt(T(1) + t * t);
        const T s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const T wip = w(i, p), wiq = w(i, q);
          w(i, p) = c * wip - s * wiq;
          w(i, q) = s * wip + c * wiq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const T vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip - s * viq;
          v(i, q) = s * vip + c * viq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<T> sigma(n);
  for (std::size_t j = 0; j < n; ++j) {
    T acc(0);
    for (std::size_t i = 0; i < m; ++i) acc += w(i, j) * w(i, j);
    sigma[j] = sqrt(acc);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });

  Svd<T> out;
  out.sigma.resize(n);
  out.u = Mat<T>(m, n);
  out.v = Mat<T>(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    out.sigma[j] = sigma[src];
    if (sigma[src] > T(0))
      for (std::size_t i = 0; i < m; ++i)
        out.u(i, j) = w(i, src) / sigma[src];
    for (std::size_t i = 0; i < n; ++i) out.v(i, j) = v(i, src);
  }
  if (transposed) std::swap(out.u, out.v);
  return out;
}

/// Orthonormal basis for the column space (modified Gram-Schmidt with one
/// reorthogonalization pass); columns with residual norm below drop_tol
/// times the original column norm are dropped.
inline DenseMatrix orthonormal_columns(const DenseMatrix& x,
                                       double drop_tol = 1e-12) {
  const std::size_t m = x.rows();
  std::vector<std::vector<double>> basis;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    std::vector<double> col(m);
    double norm0 = 0;
    for (std::size_t i = 0; i < m; ++i) {
      col[i] = x(i, j);
      norm0 += col[i] * col[i];
    }
    norm0 = std::sqrt(norm0);
    if (norm0 == 0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        double dot = 0;
        for (std::size_t i = 0; i < m; ++i) dot += b[i] * col[i];
        for (std::size_t i = 0; i < m; ++i) col[i] -= dot * b[i];
      }
    }
    double norm = 0;
    for (double vi : col) norm += vi * vi;
    norm = std::sqrt(norm);
    if (norm <= drop_tol * norm0) continue;
    for (double& vi : col) vi /= norm;
    basis.push_back(std::move(col));
  }
  DenseMatrix q(m, basis.size());
  for (std::size_t j = 0; j < basis.size(); ++j)
    for (std::size_t i = 0; i < m; ++i) q(i, j) = basis[j][i];
  return q;
}

/// Extend an orthonormal matrix to exactly k columns by orthogonalizing
/// standard basis vectors against it. Requires k <= rows.
inline DenseMatrix complete_orthonormal(const DenseMatrix& u, std::size_t k) {
  const std::size_t m = u.rows();
  if (k > m)
    throw std::invalid_argument("complete_orthonormal: k exceeds dimension");
  if (u.cols() >= k) {
    DenseMatrix out(m, k);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < m; ++i) out(i, j) = u(i, j);
    return out;
  }
  DenseMatrix work(m, k);
  for (std::size_t j = 0; j < u.cols(); ++j)
    for (std::size_t i = 0; i < m; ++i) work(i, j) = u(i, j);
  std::size_t have = u.cols();
  for (std::size_t e = 0; e < m && have < k; ++e) {
    std::vector<double> col(m, 0.0);
    col[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t b = 0; b < have; ++b) {
        double dot = 0;
        for (std::size_t i = 0; i < m; ++i) dot += work(i, b) * col[i];
        for (std::size_t i = 0; i < m; ++i) col[i] -= dot * work(i, b);
      }
    }
    double norm = 0;
    for (double vi : col) norm += vi * vi;
    norm = std::sqrt(norm);
    if (norm < 0.5) continue;  // e_i nearly inside the current span
    for (std::size_t i = 0; i < m; ++i) work(i, have) = col[i] / norm;
    ++have;
  }
  if (have < k)
    throw std::runtime_error("complete_orthonormal: could not complete basis");
  return work;
}

/// Moore-Penrose pseudoinverse; singular values below rel_tol * sigma_max
/// are treated as zero.
inline DenseMatrix pseudo_inverse(const DenseMatrix& a,
                                  double rel_tol = 1e-12) {
  Svd<double> s = jacobi_svd(a);
  const double cutoff = s.sigma.empty() ? 0.0 : rel_tol * s.sigma[0];
  DenseMatrix out(a.cols(), a.rows());
  for (std::size_t r = 0; r < s.sigma.size(); ++r) {
    if (s.sigma[r] <= cutoff || s.sigma[r] == 0.0) continue;
    const double inv = 1.0 / s.sigma[r];
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double vi = s.v(i, r) * inv;
      if (vi == 0.0) continue;
      for (std::size_t j = 0; j < a.rows(); ++j) out(i, j) += vi * s.u(j, r);
    }
  }
  return out;
}

/// Minimum-norm least squares solution of min_X ||A X - B||_F.
inline DenseMatrix least_squares(const DenseMatrix& a, const DenseMatrix& b,
                                 double rel_tol = 1e-12) {
  if (a.rows() != b.rows())
    throw std::invalid_argument("least_squares: row mismatch");
  return matmul(pseudo_inverse(a, rel_tol), b);
}

/// Top-k left singular vectors of M computed through the small Gram matrix
/// M M^T; the method of choice when M is very wide. Always returns exactly
/// k orthonormal columns (basis-completed if rank(M) < k).
inline DenseMatrix top_left_singular_vectors(const DenseMatrix& m,
                                             std::size_t k) {
  if (k > m.rows())
    throw std::invalid_argument("top_left_singular_vectors: k > rows");
  SymmetricEig<double> eig = symmetric_eig(matmul_nt(m, m));
  DenseMatrix u(m.rows(), k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) u(i, j) = eig.vectors(i, j);
  return u;
}

}  // namespace klra
