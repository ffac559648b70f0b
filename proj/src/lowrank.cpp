#include "klra/lowrank.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "klra/rff.hpp"
#include "klra/sketch.hpp"
#include "klra/spectral.hpp"

namespace klra::lowrank {

namespace {

double now_ms() {
  using namespace std::chrono;
  return duration<double, std::milli>(steady_clock::now().time_since_epoch())
      .count();
}

// Thin SVD factors with singular values below rel_tol * sigma_max dropped.
struct ThinSvd {
  DenseMatrix u;
  std::vector<double> sigma;
  DenseMatrix v;
};

ThinSvd thin_svd(const DenseMatrix& m, double rel_tol = 1e-12) {
  Svd<double> s = jacobi_svd(m);
  std::size_t rank = 0;
  const double cutoff = s.sigma.empty() ? 0.0 : rel_tol * s.sigma[0];
  while (rank < s.sigma.size() && s.sigma[rank] > cutoff && s.sigma[rank] > 0)
    ++rank;
  ThinSvd out;
  out.sigma.assign(s.sigma.begin(), s.sigma.begin() + rank);
  out.u = DenseMatrix(m.rows(), rank);
  out.v = DenseMatrix(m.cols(), rank);
  for (std::size_t j = 0; j < rank; ++j) {
    for (std::size_t i = 0; i < m.rows(); ++i) out.u(i, j) = s.u(i, j);
    for (std::size_t i = 0; i < m.cols(); ++i) out.v(i, j) = s.v(i, j);
  }
  return out;
}

// A A^T X without materializing A A^T.
DenseMatrix gram_times(const SparseMatrix& a, const DenseMatrix& x) {
  return spmm(a, spmm_tn(a, x));
}

}  // namespace

DenseMatrix rank_constrained_regression(const DenseMatrix& c,
                                        const DenseMatrix& a,
                                        const DenseMatrix& b, std::size_t k) {
  if (a.rows() != c.rows() || b.cols() != c.cols())
    throw std::invalid_argument(
        "rank_constrained_regression: incompatible shapes");
  if (k < 1)
    throw std::invalid_argument("rank_constrained_regression: k must be >= 1");

  ThinSvd sa = thin_svd(a);
  ThinSvd sb = thin_svd(b);
  if (sa.sigma.empty() || sb.sigma.empty())
    return DenseMatrix(a.cols(), b.rows());

  // M = U_A^T C V_B, then the truncation [P_A C P_B]_k = U_A M_k V_B^T.
  DenseMatrix m = matmul(matmul_tn(sa.u, c), sb.v);
  const std::size_t kk = std::min({k, m.rows(), m.cols()});
  Svd<double> sm = jacobi_svd(m);

  // Y = V_A Sigma_A^-1 M_k Sigma_B^-1 U_B^T assembled as a sum of outer
  // products over the kept triplets of M.
  DenseMatrix left(a.cols(), kk);   // V_A Sigma_A^-1 U_M_k sigma_M
  DenseMatrix right(b.rows(), kk);  // U_B Sigma_B^-1 V_M_k
  for (std::size_t t = 0; t < kk; ++t) {
    for (std::size_t i = 0; i < a.cols(); ++i) {
      double acc = 0;
      for (std::size_t r = 0; r < sa.sigma.size(); ++r)
        acc += sa.v(i, r) / sa.sigma[r] * sm.u(r, t);
      left(i, t) = acc * sm.sigma[t];
    }
    for (std::size_t i = 0; i < b.rows(); ++i) {
      double acc = 0;
      for (std::size_t r = 0; r < sb.sigma.size(); ++r)
        acc += sb.u(i, r) / sb.sigma[r] * sm.v(r, t);
      right(i, t) = acc;
    }
  }
  return matmul_nt(left, right);
}

LowRankFactor gram_lra(const SparseMatrix& a, const GramLraConfig& config,
                       SeededRng& rng) {
  const std::size_t n = a.rows();
  if (config.k < 1 || config.k > n)
    throw std::invalid_argument("gram_lra: k out of range");
  if (!(config.epsilon > 0))
    throw std::invalid_argument("gram_lra: epsilon must be positive");

  const std::size_t r = config.outer_width();
  const std::size_t t = config.refine_width();

  // Widths at or beyond n degenerate to the identity: the sketch stage is
  // then lossless and skipped.
  auto row_sketch = [&](std::size_t width) {
    return width < n ? std::optional<sketch::CountSketchMatrix>(
                           sketch::CountSketchMatrix::sample(n, width, rng))
                     : std::nullopt;
  };
  auto apply_gram = [&](const std::optional<sketch::CountSketchMatrix>& s) {
    // A A^T S (or A A^T when the sketch is the identity).
    if (s) return gram_times(a, transpose(countsketch_apply_left(*s, a)));
    return gram(a);
  };
  auto sketch_rows = [&](const std::optional<sketch::CountSketchMatrix>& s,
                         const DenseMatrix& x) {
    return s ? countsketch_apply_left(*s, x) : x;
  };

  const auto sk_r = row_sketch(r);
  const auto sk_s = row_sketch(r);
  const auto sk_tl = row_sketch(t);
  const auto sk_tr = row_sketch(t);

  DenseMatrix gr = apply_gram(sk_r);   // A A^T R, n x r'
  DenseMatrix gs = apply_gram(sk_s);   // A A^T S
  DenseMatrix gtr = apply_gram(sk_tr); // A A^T T_R

  DenseMatrix reg_a = sketch_rows(sk_tl, gr);              // T_L^T A A^T R
  DenseMatrix reg_b = transpose(sketch_rows(sk_tr, gs));   // S^T A A^T T_R
  DenseMatrix reg_c = sketch_rows(sk_tl, gtr);             // T_L^T A A^T T_R

  DenseMatrix y = rank_constrained_regression(reg_c, reg_a, reg_b, config.k);

  // Split Y = U Sigma V^T and push the halves through the tall products:
  // N1 = (A A^T R) U sqrt(Sigma), N2 = (A A^T S) V sqrt(Sigma), so that
  // N1 N2^T = A A^T R Y S^T A A^T.
  Svd<double> sy = jacobi_svd(y);
  const std::size_t kk = std::min<std::size_t>(config.k, sy.sigma.size());
  DenseMatrix uh(y.rows(), kk), vh(y.cols(), kk);
  for (std::size_t j = 0; j < kk; ++j) {
    const double h = std::sqrt(sy.sigma[j]);
    for (std::size_t i = 0; i < y.rows(); ++i) uh(i, j) = sy.u(i, j) * h;
    for (std::size_t i = 0; i < y.cols(); ++i) vh(i, j) = sy.v(i, j) * h;
  }
  DenseMatrix n1 = matmul(gr, uh);
  DenseMatrix n2 = matmul(gs, vh);
  return LowRankFactor::factor_pair(std::move(n1), std::move(n2), config.k);
}

DenseMatrix input_sparsity_lra(const DenseMatrix& m, std::size_t k,
                               double epsilon, SeededRng& rng, bool exact) {
  const std::size_t n = m.rows();
  if (k < 1 || k > std::min(n, m.cols()))
    throw std::invalid_argument("input_sparsity_lra: k out of range");
  if (exact) return top_left_singular_vectors(m, k);
  if (!(epsilon > 0))
    throw std::invalid_argument("input_sparsity_lra: epsilon must be positive");

  const std::size_t width = static_cast<std::size_t>(
      std::ceil(10.0 * static_cast<double>(k) / epsilon));
  DenseMatrix range;
  if (width < m.cols()) {
    auto cs = sketch::CountSketchMatrix::sample(m.cols(), width, rng);
    range = sketch::countsketch_apply(m, cs);  // M S^T, n x width
  } else {
    range = m;
  }
  DenseMatrix u = orthonormal_columns(range);
  if (u.cols() == 0) return complete_orthonormal(DenseMatrix(n, 0), k);

  // Best rank-k inside the captured subspace.
  DenseMatrix p = matmul_tn(u, m);  // u' x cols
  const std::size_t kk = std::min<std::size_t>(k, p.rows());
  DenseMatrix w = top_left_singular_vectors(p, kk);
  DenseMatrix q = matmul(u, w);
  if (kk < k) q = complete_orthonormal(q, k);
  return q;
}

KernelPcaResult kernel_pca(const SparseMatrix& a, const KernelSpec& spec,
                           const KernelPcaConfig& config, SeededRng& rng) {
  if (!(config.lambda > 0))
    throw std::invalid_argument("kernel_pca: lambda must be positive");
  rff::RadialDensity density = rff::RadialDensity::for_kernel(spec);

  KernelPcaResult out;
  out.lambda = config.lambda;
  out.s = rff::pcp_sample_size(a.rows(), config.lambda, config.epsilon,
                               config.delta, config.pcp_constant);

  const double t0 = now_ms();
  // Dot products a_j . eta_m through the (possibly sketched) Gaussian
  // product; the diagonal norm rescaling reuses the effective column norms.
  sketch::FastGaussianProduct fg = sketch::fast_gaussian_product(
      a, out.s, 1.0 / 200.0, config.sketch_inner_dim, rng);
  DenseMatrix dots = std::move(fg.product);
  for (std::size_t mcol = 0; mcol < out.s; ++mcol) {
    const double target = density.sample_norm(a.cols(), rng);
    const double scale =
        fg.column_norms[mcol] > 0 ? target / fg.column_norms[mcol] : 0.0;
    for (std::size_t i = 0; i < dots.rows(); ++i) dots(i, mcol) *= scale;
  }
  rff::FeatureMatrix z = rff::feature_matrix_from_dots(dots);
  const double t1 = now_ms();

  out.q = input_sparsity_lra(z.entries, config.k, config.epsilon, rng);
  const double t2 = now_ms();
  out.feature_stage_ms = t1 - t0;
  out.lra_stage_ms = t2 - t1;
  return out;
}

double relative_lra_error(const DenseMatrix& k, const LowRankFactor& approx) {
  DenseMatrix recon = approx.kind() == LowRankFactor::Kind::orthonormal
                          ? approx.reconstruct(&k)
                          : approx.reconstruct();
  if (recon.rows() != k.rows() || recon.cols() != k.cols())
    throw std::invalid_argument("relative_lra_error: shape mismatch");
  const double num = frobenius_norm_sq(k - recon);

  Svd<double> s = jacobi_svd(k);
  double denom = 0;
  for (std::size_t i = approx.rank(); i < s.sigma.size(); ++i)
    denom += s.sigma[i] * s.sigma[i];

  const double scale = frobenius_norm_sq(k);
  const double zero = 1e-20 * std::max(1.0, scale);
  if (denom <= zero)
    return num <= std::max(zero, 1e-16 * scale)
               ? 1.0
               : std::numeric_limits<double>::infinity();
  return num / denom;
}

}  // namespace klra::lowrank
