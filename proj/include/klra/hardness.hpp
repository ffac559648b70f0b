#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "klra/extprec.hpp"
#include "klra/kernels.hpp"
#include "klra/matrix.hpp"
#include "klra/rng.hpp"
#include "klra/spectral.hpp"

namespace klra::hardness {

/// Which reduction is being exercised. The first three invoke a low-rank
/// approximation oracle on the stacked gadget matrix and read the integer
/// product out of the approximation by grid rounding; `span` does the same
/// from an orthonormal basis alone via leverage-score regression.
enum class GadgetKind { linear, dot_product, distance, span };

GadgetKind parse_gadget_kind(const std::string& text);
std::string gadget_kind_name(GadgetKind kind);

/// Rounding fails loudly when a residual exceeds this fraction of the grid
/// spacing; exact halves cannot occur for an oracle honoring its
/// approximation contract, so anything near half signals a violation.
inline constexpr double kResidualAcceptFrac = 0.45;

/// Appendix-style leverage sample count c * k * log2(k+1) with c = 40.
inline constexpr double kSpanSampleConstant = 40.0;

class recovery_error : public std::runtime_error {
 public:
  recovery_error(const std::string& what, double residual_frac)
      : std::runtime_error(what), residual_frac(residual_frac) {}
  double residual_frac;
};

class precision_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Double-precision summary of a gadget's scaling: weights, rounding grid,
/// rank budget, and a bound on kernel-entry magnitude, from which precision
/// requirements are decided before any scalar type is instantiated.
struct GadgetScales {
  GadgetKind kind;
  std::size_t n = 0, d = 0, k = 0;
  double delta1 = 1, delta2 = 1;
  double w1 = 1, w2 = 1;
  double c0 = 0, c1 = 1;
  double grid = 1;  // |c1| w1 w2 (w for the linear kinds)
  std::size_t rank_budget = 0;
  double max_entry_bound = 1;  // upper bound on |K_ij|
};

GadgetScales gadget_scales(GadgetKind kind, std::size_t n, std::size_t d,
                           std::size_t k, double delta1, double delta2,
                           const KernelSpec* spec);

/// Working-precision selection. Auto mode requires the rounding grid to
/// exceed guard (>= 1e3) times the expected floating-point noise
/// (n+k) * 2^(1-mantissa) * max|K|; a forced double request is honored down
/// to a 10x margin and refused below it.
struct PrecisionPolicy {
  PrecisionMode mode = PrecisionMode::fp64;
  double guard = kAutoGuard;
  double achieved_ratio = 0;  // grid / noise bound at the chosen mode

  static constexpr double kAutoGuard = 1e3;
  static constexpr double kForcedFloor = 10.0;

  static double noise_bound(int mantissa_bits, std::size_t dim,
                            double max_entry) {
    return static_cast<double>(dim) * std::ldexp(1.0, 1 - mantissa_bits) *
           max_entry;
  }

  static PrecisionPolicy select_auto(const GadgetScales& scales);
  static PrecisionPolicy validate(PrecisionMode mode,
                                  const GadgetScales& scales);
};

/// The stacked reduction input B = [w1 A^T, w2 C]^T together with every
/// scalar the recovery step needs, all held in the working precision T.
template <typename T>
struct ReductionGadget {
  GadgetKind kind = GadgetKind::linear;
  std::size_t n = 0, d = 0, k = 0;
  Mat<T> b;  // (n+k) x d
  T w1{1}, w2{1};
  T c0{0}, c1{1};
  T grid{1};
  std::size_t rank_budget = 0;
  KernelSpec spec = KernelSpec::linear();
  std::vector<T> row_sqnorms;  // |b_i|^2, filled for the distance kind
  GadgetScales scales;
};

/// Oracle output: the approximation left * right^T. Symmetric factors set
/// right = left; a full approximation matrix may be supplied instead.
template <typename T>
struct OracleOutput {
  Mat<T> left, right;
  std::optional<Mat<T>> full;

  static OracleOutput symmetric(Mat<T> factor) {
    OracleOutput o;
    o.left = factor;
    o.right = std::move(factor);
    return o;
  }
  static OracleOutput pair(Mat<T> l, Mat<T> r) {
    OracleOutput o;
    o.left = std::move(l);
    o.right = std::move(r);
    return o;
  }
  static OracleOutput full_matrix(Mat<T> k) {
    OracleOutput o;
    o.full = std::move(k);
    return o;
  }

  T entry(std::size_t i, std::size_t j) const {
    if (full) return (*full)(i, j);
    T acc(0);
    for (std::size_t r = 0; r < left.cols(); ++r)
      acc += left(i, r) * right(j, r);
    return acc;
  }
  std::size_t rank() const { return full ? full->rows() : left.cols(); }
};

template <typename T>
using LraOracle =
    std::function<OracleOutput<T>(const ReductionGadget<T>&, SeededRng&)>;

namespace detail {

inline void require_integer_entries(const DenseMatrix& m, const char* name) {
  for (double v : m.data())
    if (!std::isfinite(v) || v != std::nearbyint(v))
      throw std::invalid_argument(std::string("build_gadget: ") + name +
                                  " must have integer entries");
}

inline double integer_bound(const DenseMatrix& a, const DenseMatrix& c) {
  return std::max(1.0, std::max(max_abs(a), max_abs(c)));
}

template <typename T>
long long round_to_ll(const T& x) {
  using std::round;
  T r = round(x);
  if constexpr (std::is_same_v<T, double>) {
    return static_cast<long long>(r);
  } else {
    return r.template convert_to<long long>();
  }
}

template <typename T>
double to_double(const T& x) {
  if constexpr (std::is_same_v<T, double>) {
    return x;
  } else {
    return x.template convert_to<double>();
  }
}

}  // namespace detail

/// Stack B per the reduction formulas and fix the rounding grid. A and C
/// must be integer-valued; delta2 is taken from the data unless a larger
/// bound is supplied explicitly (weights only shrink).
template <typename T>
ReductionGadget<T> build_gadget(GadgetKind kind, const DenseMatrix& a,
                                const DenseMatrix& c, double delta1,
                                const KernelSpec* spec = nullptr,
                                double delta2_override = 0) {
  using std::abs;
  using std::sqrt;
  detail::require_integer_entries(a, "A");
  detail::require_integer_entries(c, "C");
  if (a.cols() != c.rows())
    throw std::invalid_argument("build_gadget: A cols must equal C rows");
  if (delta1 < 1)
    throw std::invalid_argument("build_gadget: delta1 must be >= 1");
  const double data_bound = detail::integer_bound(a, c);
  if (delta2_override != 0 && delta2_override < data_bound)
    throw std::invalid_argument(
        "build_gadget: delta2 override below the actual entry bound");
  const double delta2 = delta2_override != 0 ? delta2_override : data_bound;

  ReductionGadget<T> g;
  g.kind = kind;
  g.n = a.rows();
  g.d = a.cols();
  g.k = c.cols();
  g.scales = gadget_scales(kind, g.n, g.d, g.k, delta1, delta2, spec);
  g.rank_budget = g.scales.rank_budget;

  const T nd = T(static_cast<double>(g.n)) * T(static_cast<double>(g.d));
  const T sqrt_d1 = sqrt(T(delta1));
  const T d2 = T(delta2);

  switch (kind) {
    case GadgetKind::linear:
    case GadgetKind::span: {
      g.w1 = T(1);
      g.w2 = T(3) * sqrt_d1 * d2 * d2 * nd;
      g.c0 = T(0);
      g.c1 = T(1);
      g.spec = KernelSpec::linear();
      break;
    }
    case GadgetKind::dot_product: {
      if (spec == nullptr || !spec->has_series() || !spec->is_dot_product())
        throw std::invalid_argument(
            "build_gadget: dot-product kind needs a dot-product kernel with "
            "series metadata");
      g.spec = *spec;
      // Series scalars are recomputed in the working precision so the
      // recovery grid stays in sync with the kernel evaluation.
      T growth(1), c0(0), c1(1);
      if (spec->kind() == KernelSpec::Kind::polynomial) {
        growth = T(spec->poly_q()) / T(spec->poly_c());
        if (growth < T(1)) growth = T(1);
        const int q = spec->poly_q();
        const T cc = T(spec->poly_c());
        c0 = T(1);
        for (int i = 0; i < q; ++i) c0 *= cc;
        c1 = T(q);
        for (int i = 0; i < q - 1; ++i) c1 *= cc;
      }
      g.w2 = T(1) / (T(4) * sqrt(growth * T(static_cast<double>(g.d))) * d2);
      g.w1 = g.w2 / (T(12) * sqrt_d1 * d2 * d2 * nd);
      g.c0 = c0;
      g.c1 = c1;
      break;
    }
    case GadgetKind::distance: {
      if (spec == nullptr || !spec->has_series() || !spec->is_distance())
        throw std::invalid_argument(
            "build_gadget: distance kind needs a distance kernel with "
            "series metadata");
      g.spec = *spec;
      T growth = T(1) / T(spec->sigma());
      if (growth < T(1)) growth = T(1);
      const T heavy = T(36) * sqrt_d1 * d2 * d2 * nd;
      const T dd = T(static_cast<double>(g.d));
      g.w2 = T(1) / ((T(16) * growth * dd * dd * d2 * d2 * d2 * d2) * heavy);
      g.w1 = g.w2 / heavy;
      g.c0 = T(1);
      g.c1 = T(-1) / T(spec->sigma());
      break;
    }
  }
  g.grid = abs(g.c1) * g.w1 * g.w2;

  g.b = Mat<T>(g.n + g.k, g.d);
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = 0; j < g.d; ++j) g.b(i, j) = g.w1 * T(a(i, j));
  for (std::size_t j = 0; j < g.k; ++j)
    for (std::size_t i = 0; i < g.d; ++i)
      g.b(g.n + j, i) = g.w2 * T(c(i, j));

  if (kind == GadgetKind::distance) {
    g.row_sqnorms.resize(g.n + g.k);
    for (std::size_t i = 0; i < g.n + g.k; ++i) {
      T acc(0);
      for (std::size_t j = 0; j < g.d; ++j) acc += g.b(i, j) * g.b(i, j);
      g.row_sqnorms[i] = acc;
    }
  }
  return g;
}

/// The kernel matrix the oracle sees: B B^T for the linear kinds, f applied
/// to pairwise dots or squared distances otherwise.
template <typename T>
Mat<T> gadget_kernel_matrix(const ReductionGadget<T>& g) {
  const std::size_t m = g.n + g.k;
  Mat<T> k(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      T dot(0);
      for (std::size_t t = 0; t < g.d; ++t) dot += g.b(i, t) * g.b(j, t);
      T v;
      switch (g.kind) {
        case GadgetKind::linear:
        case GadgetKind::span:
          v = dot;
          break;
        case GadgetKind::dot_product:
          v = g.spec.template value_from_dot<T>(dot);
          break;
        case GadgetKind::distance: {
          T sq = i == j ? T(0)
                        : g.row_sqnorms[i] + g.row_sqnorms[j] - T(2) * dot;
          if (sq < T(0)) sq = T(0);
          v = g.spec.template value_from_sqdist<T>(sq);
          break;
        }
      }
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

/// The plug-in exact oracle: eigendecomposition of the kernel matrix,
/// truncated to the rank budget (delta1 = 1 up to floating-point error).
template <typename T>
OracleOutput<T> exact_svd_oracle(const ReductionGadget<T>& g, SeededRng&) {
  using std::sqrt;
  Mat<T> k = gadget_kernel_matrix(g);
  SymmetricEig<T> eig = symmetric_eig(k);
  const std::size_t m = g.n + g.k;
  const std::size_t r = std::min<std::size_t>(g.rank_budget, m);
  // Budgets beyond the matrix dimension zero-pad; the approximation is
  // already exact at full rank.
  Mat<T> factor(m, g.rank_budget);
  for (std::size_t j = 0; j < r; ++j) {
    const T lam = eig.values[j] > T(0) ? eig.values[j] : T(0);
    const T root = sqrt(lam);
    for (std::size_t i = 0; i < m; ++i)
      factor(i, j) = eig.vectors(i, j) * root;
  }
  return OracleOutput<T>::symmetric(std::move(factor));
}

template <typename T>
OracleOutput<T> zero_oracle(const ReductionGadget<T>& g, SeededRng&) {
  return OracleOutput<T>::symmetric(Mat<T>(g.n + g.k, g.rank_budget));
}

/// Round the oracle's approximation back to the integer product. Entries of
/// the n x k block are formed lazily from the factors; `noise`, when given,
/// is added entrywise (robustness experiments). Throws recovery_error when
/// a residual exceeds max_frac of the grid or a distance-kind parity check
/// fails.
template <typename T>
DenseMatrix recover_product(const ReductionGadget<T>& g,
                            const OracleOutput<T>& approx,
                            const Mat<T>* noise = nullptr,
                            double max_frac = kResidualAcceptFrac,
                            double* max_residual_frac_seen = nullptr) {
  using std::abs;
  if (approx.rank() != g.rank_budget && !approx.full)
    throw std::invalid_argument(
        "recover_product: oracle factor rank does not match the gadget's "
        "rank budget");
  DenseMatrix out(g.n, g.k);
  double worst = 0;
  for (std::size_t i = 0; i < g.n; ++i) {
    for (std::size_t j = 0; j < g.k; ++j) {
      T raw = approx.entry(i, g.n + j);
      if (noise != nullptr) raw += (*noise)(i, j);
      T v;
      switch (g.kind) {
        case GadgetKind::linear:
        case GadgetKind::span:
          v = raw;
          break;
        case GadgetKind::dot_product:
          v = raw - g.c0;
          break;
        case GadgetKind::distance:
          v = raw - g.c0 -
              g.c1 * (g.row_sqnorms[i] + g.row_sqnorms[g.n + j]);
          break;
      }
      const T signed_grid = g.kind == GadgetKind::linear ||
                                    g.kind == GadgetKind::span
                                ? g.w2
                                : g.c1 * g.w1 * g.w2;
      const T units = v / signed_grid;
      const long long m = detail::round_to_ll(units);
      const double resid = detail::to_double(abs(units - T(m)));
      worst = std::max(worst, resid);
      if (!(resid < max_frac))
        throw recovery_error(
            "recover_product: rounding residual " + std::to_string(resid) +
                " of the grid exceeds the acceptance threshold " +
                std::to_string(max_frac) +
                " (oracle contract violation or insufficient precision)",
            resid);
      if (g.kind == GadgetKind::distance) {
        if (m % 2 != 0)
          throw recovery_error(
              "recover_product: distance-kind rounding produced an odd "
              "multiple, which cannot encode an integer product entry",
              resid);
        out(i, j) = static_cast<double>(-m / 2);
      } else {
        out(i, j) = static_cast<double>(m);
      }
    }
  }
  if (max_residual_frac_seen != nullptr) *max_residual_frac_seen = worst;
  return out;
}

/// Theorem tail diagnostics: the analytic bound on |sum_{q>=2} c_q x^q| over
/// the relevant entries, next to the empirically summed tail (q <= 30).
struct SeriesTailBound {
  double bound = 0;
  double empirical = 0;
};

template <typename T>
SeriesTailBound series_tail_bound(const ReductionGadget<T>& g) {
  using std::abs;
  SeriesTailBound out;
  if (g.kind == GadgetKind::linear || g.kind == GadgetKind::span) return out;

  const int horizon = 30;
  const std::size_t m = g.n + g.k;
  T max_dot(0), max_tail(0);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j_lo = g.kind == GadgetKind::distance ? g.n : i;
    for (std::size_t j = j_lo; j < m; ++j) {
      if (g.kind == GadgetKind::distance && i >= g.n) continue;
      T dot(0);
      for (std::size_t t = 0; t < g.d; ++t) dot += g.b(i, t) * g.b(j, t);
      T x = dot;
      if (g.kind == GadgetKind::distance) {
        x = g.row_sqnorms[i] + g.row_sqnorms[j] - T(2) * dot;
        if (x < T(0)) x = T(0);
      }
      if (abs(x) > max_dot) max_dot = abs(x);
      T tail(0);
      T power = x * x;
      for (int q = 2; q <= horizon; ++q) {
        tail += T(g.spec.series_coeff(q)) * power;
        power *= x;
      }
      if (abs(tail) > max_tail) max_tail = abs(tail);
    }
  }
  out.empirical = detail::to_double(max_tail);
  if (g.kind == GadgetKind::dot_product) {
    out.bound = detail::to_double(abs(g.c1) * max_dot) / 12.0;
  } else {
    out.bound = detail::to_double(abs(g.c1) * g.w1 * g.w2) / 3.0;
  }
  return out;
}

/// Residual of projecting B B^T onto the proof's helper span (the heavy
/// strip plus the row space of the cross block); bounded by
/// delta2^4 n^2 d^2 whenever the gadget satisfies the theorem hypotheses.
double heavy_strip_projection_residual(const DenseMatrix& a,
                                       const DenseMatrix& c, double delta1);

/// Recover AC from an orthonormal basis Z alone (span reduction): project
/// the last k columns of B B^T onto Z via leverage-score sampled
/// regression, then grid-round. rhs_noise_frac perturbs the regression
/// target entrywise by that fraction of the grid (robustness experiments).
DenseMatrix recover_from_span(const ReductionGadget<double>& g,
                              const DenseMatrix& z, SeededRng& rng,
                              double rhs_noise_frac = 0,
                              double max_frac = kResidualAcceptFrac,
                              double* max_residual_frac_seen = nullptr);

struct TrialOutcome {
  bool success = false;
  bool residual_rejected = false;  // recovery_error was raised
  double max_residual_frac = 0;
};

struct VerifyReport {
  GadgetKind kind = GadgetKind::linear;
  std::size_t n = 0, d = 0, k = 0;
  double delta1 = 1, delta2 = 1;
  double w1 = 1, w2 = 1, grid = 1;
  std::size_t rank_budget = 0;
  PrecisionMode mode = PrecisionMode::fp64;
  std::size_t trials = 0, successes = 0;
  double success_rate = 0;
  double max_residual_frac = 0;
  std::vector<TrialOutcome> per_trial;
};

/// End-to-end reduction check on a fixed instance: build the gadget, call
/// the oracle `trials` times, recover, and compare against exact integer
/// multiplication. noise_frac > 0 injects +-(grid * noise_frac) adversarial
/// entrywise noise into the approximated block before rounding. Failures
/// are reported, not raised.
template <typename T>
VerifyReport verify_reduction(GadgetKind kind, const DenseMatrix& a,
                              const DenseMatrix& c, double delta1,
                              const LraOracle<T>& oracle, std::size_t trials,
                              SeededRng& rng, double noise_frac = 0,
                              const KernelSpec* spec = nullptr) {
  ReductionGadget<T> g = build_gadget<T>(kind, a, c, delta1, spec);

  // Exact product for the success check.
  DenseMatrix truth(g.n, g.k);
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = 0; j < g.k; ++j) {
      long long acc = 0;
      for (std::size_t t = 0; t < g.d; ++t)
        acc += static_cast<long long>(a(i, t)) *
               static_cast<long long>(c(t, j));
      truth(i, j) = static_cast<double>(acc);
    }

  VerifyReport report;
  report.kind = kind;
  report.n = g.n;
  report.d = g.d;
  report.k = g.k;
  report.delta1 = delta1;
  report.delta2 = g.scales.delta2;
  report.w1 = detail::to_double(g.w1);
  report.w2 = detail::to_double(g.w2);
  report.grid = detail::to_double(g.grid);
  report.rank_budget = g.rank_budget;
  report.trials = trials;

  for (std::size_t trial = 0; trial < trials; ++trial) {
    SeededRng trng = rng.derive(trial);
    TrialOutcome outcome;
    try {
      OracleOutput<T> approx = oracle(g, trng);
      std::optional<Mat<T>> noise;
      if (noise_frac > 0) {
        noise.emplace(g.n, g.k);
        const T mag = g.grid * T(noise_frac);
        for (auto& v : noise->data())
          v = (trng.next_u64() & 1) ? mag : -mag;
      }
      DenseMatrix rec =
          recover_product(g, approx, noise ? &*noise : nullptr,
                          kResidualAcceptFrac, &outcome.max_residual_frac);
      outcome.success = rec.data() == truth.data();
    } catch (const recovery_error& e) {
      outcome.residual_rejected = true;
      outcome.max_residual_frac = e.residual_frac;
    }
    report.max_residual_frac =
        std::max(report.max_residual_frac, outcome.max_residual_frac);
    if (outcome.success) ++report.successes;
    report.per_trial.push_back(outcome);
  }
  report.success_rate = trials == 0 ? 0
                                    : static_cast<double>(report.successes) /
                                          static_cast<double>(trials);
  return report;
}

}  // namespace klra::hardness
