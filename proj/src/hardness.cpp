#include "klra/hardness.hpp"

#include <algorithm>
#include <cmath>

#include "klra/sketch.hpp"

namespace klra {

PrecisionMode parse_precision(const std::string& text) {
  if (text == "double" || text == "fp64") return PrecisionMode::fp64;
  if (text.rfind("ext", 0) == 0) {
    const int bits = std::stoi(text.substr(3));
    return extended_mode_for_bits(bits);
  }
  throw std::invalid_argument("unknown precision '" + text +
                              "' (expected double, ext128, or extN)");
}

PrecisionMode extended_mode_for_bits(int bits) {
  if (bits <= 128) return PrecisionMode::ext128;
  if (bits <= 192) return PrecisionMode::ext192;
  if (bits <= 256) return PrecisionMode::ext256;
  throw std::invalid_argument(
      "extended precision beyond 256 mantissa bits is not built in");
}

}  // namespace klra

namespace klra::hardness {

GadgetKind parse_gadget_kind(const std::string& text) {
  if (text == "linear") return GadgetKind::linear;
  if (text == "dot") return GadgetKind::dot_product;
  if (text == "dist") return GadgetKind::distance;
  if (text == "span") return GadgetKind::span;
  throw std::invalid_argument("unknown gadget kind '" + text +
                              "' (expected linear, dot, dist, or span)");
}

std::string gadget_kind_name(GadgetKind kind) {
  switch (kind) {
    case GadgetKind::linear:
      return "linear";
    case GadgetKind::dot_product:
      return "dot";
    case GadgetKind::distance:
      return "dist";
    case GadgetKind::span:
      return "span";
  }
  throw std::logic_error("gadget_kind_name: unknown kind");
}

GadgetScales gadget_scales(GadgetKind kind, std::size_t n, std::size_t d,
                           std::size_t k, double delta1, double delta2,
                           const KernelSpec* spec) {
  if (delta1 < 1)
    throw std::invalid_argument("gadget_scales: delta1 must be >= 1");
  if (delta2 < 1)
    throw std::invalid_argument("gadget_scales: delta2 must be >= 1");
  GadgetScales s;
  s.kind = kind;
  s.n = n;
  s.d = d;
  s.k = k;
  s.delta1 = delta1;
  s.delta2 = delta2;

  const double nd = static_cast<double>(n) * static_cast<double>(d);
  const double sq1 = std::sqrt(delta1);
  const double d22 = delta2 * delta2;

  switch (kind) {
    case GadgetKind::linear:
    case GadgetKind::span: {
      s.w1 = 1;
      s.w2 = 3.0 * sq1 * d22 * nd;
      s.c0 = 0;
      s.c1 = 1;
      s.grid = s.w2;
      s.rank_budget = 2 * k;
      s.max_entry_bound = s.w2 * s.w2 * static_cast<double>(d) * d22;
      break;
    }
    case GadgetKind::dot_product: {
      if (spec == nullptr || !spec->has_series() || !spec->is_dot_product())
        throw std::invalid_argument(
            "gadget_scales: dot-product kind needs a dot-product kernel "
            "with series metadata");
      const double growth = spec->growth_bound();
      s.w2 = 1.0 / (4.0 * std::sqrt(growth * static_cast<double>(d)) * delta2);
      s.w1 = s.w2 / (12.0 * sq1 * d22 * nd);
      s.c0 = spec->series_c0();
      s.c1 = spec->series_c1();
      s.grid = std::fabs(s.c1) * s.w1 * s.w2;
      s.rank_budget = 2 * k + 1;
      // |b_i . b_j| <= w2^2 d delta2^2 and the series tail adds at most a
      // 13/12 factor on the linear term.
      const double max_dot = s.w2 * s.w2 * static_cast<double>(d) * d22;
      s.max_entry_bound =
          std::fabs(s.c0) + std::fabs(s.c1) * max_dot * (13.0 / 12.0);
      break;
    }
    case GadgetKind::distance: {
      if (spec == nullptr || !spec->has_series() || !spec->is_distance())
        throw std::invalid_argument(
            "gadget_scales: distance kind needs a distance kernel with "
            "series metadata");
      const double growth = spec->growth_bound();
      const double heavy = 36.0 * sq1 * d22 * nd;
      s.w2 = 1.0 / ((16.0 * growth * static_cast<double>(d) *
                     static_cast<double>(d) * d22 * d22) *
                    heavy);
      s.w1 = s.w2 / heavy;
      s.c0 = spec->series_c0();
      s.c1 = spec->series_c1();
      s.grid = std::fabs(s.c1) * s.w1 * s.w2;
      s.rank_budget = 2 * k + 3;
      const double max_sqdist =
          4.0 * static_cast<double>(d) * d22 * s.w2 * s.w2;
      s.max_entry_bound =
          std::fabs(s.c0) + std::fabs(s.c1) * max_sqdist * (13.0 / 12.0);
      break;
    }
  }
  return s;
}

PrecisionPolicy PrecisionPolicy::select_auto(const GadgetScales& scales) {
  const std::size_t dim = scales.n + scales.k;
  for (PrecisionMode mode :
       {PrecisionMode::fp64, PrecisionMode::ext128, PrecisionMode::ext192,
        PrecisionMode::ext256}) {
    const double noise =
        noise_bound(mantissa_bits(mode), dim, scales.max_entry_bound);
    if (scales.grid >= kAutoGuard * noise) {
      PrecisionPolicy p;
      p.mode = mode;
      p.guard = kAutoGuard;
      p.achieved_ratio = scales.grid / noise;
      return p;
    }
  }
  throw precision_error(
      "gadget grid spacing is below the resolution guard even at 256 "
      "mantissa bits; the instance is out of the supported range");
}

PrecisionPolicy PrecisionPolicy::validate(PrecisionMode mode,
                                          const GadgetScales& scales) {
  const std::size_t dim = scales.n + scales.k;
  const double noise =
      noise_bound(mantissa_bits(mode), dim, scales.max_entry_bound);
  const double ratio = scales.grid / noise;
  if (ratio < kForcedFloor)
    throw precision_error(
        "resolution guard unsatisfiable in " + precision_name(mode) +
        ": grid/noise ratio " + std::to_string(ratio) +
        " is below the floor " + std::to_string(kForcedFloor) +
        "; use a higher precision mode");
  PrecisionPolicy p;
  p.mode = mode;
  p.guard = kAutoGuard;
  p.achieved_ratio = ratio;
  return p;
}

double heavy_strip_projection_residual(const DenseMatrix& a,
                                       const DenseMatrix& c, double delta1) {
  ReductionGadget<double> g =
      build_gadget<double>(GadgetKind::linear, a, c, delta1);
  DenseMatrix bbt = matmul_nt(g.b, g.b);
  const std::size_t n = g.n, k = g.k, m = n + k;

  // Columns of the helper matrix: [0; V] with V spanning the columns of
  // C^T A^T, then the last k columns of B B^T itself.
  DenseMatrix cta(k, n);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < n; ++j) cta(i, j) = bbt(n + i, j);
  DenseMatrix v = orthonormal_columns(cta);

  DenseMatrix span(m, v.cols() + k);
  for (std::size_t j = 0; j < v.cols(); ++j)
    for (std::size_t i = 0; i < k; ++i) span(n + i, j) = v(i, j);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < m; ++i)
      span(i, v.cols() + j) = bbt(i, n + j);

  DenseMatrix q = orthonormal_columns(span);
  DenseMatrix proj = matmul(q, matmul_tn(q, bbt));
  return frobenius_norm_sq(bbt - proj);
}

DenseMatrix recover_from_span(const ReductionGadget<double>& g,
                              const DenseMatrix& z, SeededRng& rng,
                              double rhs_noise_frac, double max_frac,
                              double* max_residual_frac_seen) {
  if (g.kind != GadgetKind::linear && g.kind != GadgetKind::span)
    throw std::invalid_argument(
        "recover_from_span: gadget must be of the linear/span kind");
  const std::size_t m = g.n + g.k;
  if (z.rows() != m)
    throw std::invalid_argument("recover_from_span: Z row count mismatch");

  // Last k columns of B B^T: B (bottom k rows of B)^T.
  DenseMatrix bottom(g.k, g.d);
  for (std::size_t i = 0; i < g.k; ++i)
    for (std::size_t j = 0; j < g.d; ++j) bottom(i, j) = g.b(g.n + i, j);
  DenseMatrix target = matmul_nt(g.b, bottom);  // m x k

  if (rhs_noise_frac > 0) {
    const double mag = detail::to_double(g.grid) * rhs_noise_frac;
    for (auto& v : target.data())
      v += (rng.next_u64() & 1) ? mag : -mag;
  }

  const std::size_t samples = static_cast<std::size_t>(std::ceil(
      kSpanSampleConstant * static_cast<double>(g.k) *
      std::log2(static_cast<double>(g.k) + 1.0)));
  sketch::RowSampler sampler =
      sketch::leverage_sample(z, std::max<std::size_t>(samples, 1), rng);
  DenseMatrix w = sketch::sampled_least_squares(z, target, sampler);
  DenseMatrix approx = matmul(z, w);  // m x k

  DenseMatrix out(g.n, g.k);
  double worst = 0;
  for (std::size_t i = 0; i < g.n; ++i) {
    for (std::size_t j = 0; j < g.k; ++j) {
      const double units = approx(i, j) / detail::to_double(g.w2);
      const double rounded = std::nearbyint(units);
      const double resid = std::fabs(units - rounded);
      worst = std::max(worst, resid);
      if (!(resid < max_frac))
        throw recovery_error(
            "recover_from_span: rounding residual " + std::to_string(resid) +
                " of the grid exceeds the acceptance threshold " +
                std::to_string(max_frac),
            resid);
      out(i, j) = rounded;
    }
  }
  if (max_residual_frac_seen != nullptr) *max_residual_frac_seen = worst;
  return out;
}

}  // namespace klra::hardness
