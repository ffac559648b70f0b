#include "klra/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "klra/spectral.hpp"

namespace klra::sketch {

CountSketchMatrix CountSketchMatrix::sample(std::size_t input_dim,
                                            std::size_t output_dim,
                                            SeededRng& rng) {
  if (output_dim == 0)
    throw std::invalid_argument("CountSketch: output dim must be positive");
  CountSketchMatrix s;
  s.input_dim = input_dim;
  s.output_dim = output_dim;
  s.bucket.resize(input_dim);
  s.sign.resize(input_dim);
  for (std::size_t j = 0; j < input_dim; ++j) {
    s.bucket[j] = rng.below(output_dim);
    s.sign[j] = (rng.next_u64() & 1) ? 1.0 : -1.0;
  }
  return s;
}

DenseMatrix countsketch_apply(const DenseMatrix& x,
                              const CountSketchMatrix& s) {
  if (x.cols() != s.input_dim)
    throw std::invalid_argument("countsketch_apply: dimension mismatch");
  DenseMatrix out(x.rows(), s.output_dim);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double* xi = x.row_ptr(i);
    double* oi = out.row_ptr(i);
    for (std::size_t j = 0; j < x.cols(); ++j)
      oi[s.bucket[j]] += s.sign[j] * xi[j];
  }
  return out;
}

DenseMatrix countsketch_apply(const SparseMatrix& x,
                              const CountSketchMatrix& s) {
  if (x.cols() != s.input_dim)
    throw std::invalid_argument("countsketch_apply: dimension mismatch");
  DenseMatrix out(x.rows(), s.output_dim);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double* oi = out.row_ptr(i);
    for (std::size_t k = x.row_begin(i); k < x.row_end(i); ++k) {
      const std::size_t j = x.col_indices()[k];
      oi[s.bucket[j]] += s.sign[j] * x.values()[k];
    }
  }
  return out;
}

DenseMatrix countsketch_apply_left(const CountSketchMatrix& s,
                                   const DenseMatrix& x) {
  if (x.rows() != s.input_dim)
    throw std::invalid_argument("countsketch_apply_left: dimension mismatch");
  DenseMatrix out(s.output_dim, x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double* xi = x.row_ptr(i);
    double* oi = out.row_ptr(s.bucket[i]);
    const double sg = s.sign[i];
    for (std::size_t j = 0; j < x.cols(); ++j) oi[j] += sg * xi[j];
  }
  return out;
}

DenseMatrix countsketch_apply_left(const CountSketchMatrix& s,
                                   const SparseMatrix& x) {
  if (x.rows() != s.input_dim)
    throw std::invalid_argument("countsketch_apply_left: dimension mismatch");
  DenseMatrix out(s.output_dim, x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double* oi = out.row_ptr(s.bucket[i]);
    const double sg = s.sign[i];
    for (std::size_t k = x.row_begin(i); k < x.row_end(i); ++k)
      oi[x.col_indices()[k]] += sg * x.values()[k];
  }
  return out;
}

DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols,
                            SeededRng& rng) {
  DenseMatrix g(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) g(i, j) = rng.normal();
  return g;
}

std::size_t fast_gaussian_inner_dim(std::size_t n, std::size_t d,
                                    std::size_t s, double delta) {
  if (!(delta > 0) || !(delta < 1))
    throw std::invalid_argument("fast_gaussian_inner_dim: need 0 < delta < 1");
  const double logd = std::log(static_cast<double>(std::max<std::size_t>(d, 2)));
  const double log4 = logd * logd * logd * logd;
  const double t = std::ceil(static_cast<double>(n) * static_cast<double>(n) *
                             std::sqrt(static_cast<double>(s)) * log4 / delta);
  if (!(t < static_cast<double>(d))) return d;
  return std::max<std::size_t>(1, static_cast<std::size_t>(t));
}

FastGaussianProduct fast_gaussian_product(
    const SparseMatrix& a, std::size_t s, double delta,
    std::optional<std::size_t> inner_dim_override, SeededRng& rng) {
  if (s < 1)
    throw std::invalid_argument("fast_gaussian_product: s must be >= 1");
  const std::size_t d = a.cols();
  const std::size_t t =
      inner_dim_override
          ? std::min(std::max<std::size_t>(1, *inner_dim_override), d)
          : fast_gaussian_inner_dim(a.rows(), d, s, delta);

  FastGaussianProduct out;
  if (t >= d) {
    DenseMatrix g = gaussian_matrix(d, s, rng);
    out.product = spmm(a, g);
    out.column_norms.assign(s, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < s; ++j)
        out.column_norms[j] += g(i, j) * g(i, j);
    for (double& v : out.column_norms) v = std::sqrt(v);
    out.inner_dim = d;
    out.exact_path = true;
    return out;
  }

  CountSketchMatrix c = CountSketchMatrix::sample(d, t, rng);
  DenseMatrix g = gaussian_matrix(t, s, rng);
  DenseMatrix ac = countsketch_apply(a, c);
  out.product = matmul(ac, g);
  // Columns of the effective factor C G' have squared norm
  // sum_j G'(bucket[j], .)^2 = sum_b count[b] G'(b, .)^2.
  std::vector<std::size_t> count(t, 0);
  for (std::size_t j = 0; j < d; ++j) ++count[c.bucket[j]];
  out.column_norms.assign(s, 0.0);
  for (std::size_t b = 0; b < t; ++b) {
    if (count[b] == 0) continue;
    const double w = static_cast<double>(count[b]);
    for (std::size_t j = 0; j < s; ++j)
      out.column_norms[j] += w * g(b, j) * g(b, j);
  }
  for (double& v : out.column_norms) v = std::sqrt(v);
  out.inner_dim = t;
  out.exact_path = false;
  return out;
}

RowSampler leverage_sample(const DenseMatrix& z, std::size_t s,
                           SeededRng& rng) {
  if (s < 1) throw std::invalid_argument("leverage_sample: s must be >= 1");
  const std::size_t n = z.rows();
  std::vector<double> cumulative(n);
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double rn = 0;
    for (std::size_t j = 0; j < z.cols(); ++j) rn += z(i, j) * z(i, j);
    total += rn;
    cumulative[i] = total;
  }
  if (total <= 0)
    throw std::invalid_argument("leverage_sample: all rows are zero");

  RowSampler out;
  out.source_rows = n;
  out.indices.resize(s);
  out.weights.resize(s);
  const double sd = static_cast<double>(s);
  for (std::size_t t = 0; t < s; ++t) {
    const double u = rng.uniform01() * total;
    const std::size_t idx = static_cast<std::size_t>(
        std::lower_bound(cumulative.begin(), cumulative.end(), u) -
        cumulative.begin());
    std::size_t i = std::min(idx, n - 1);
    auto mass = [&](std::size_t r) {
      return cumulative[r] - (r == 0 ? 0.0 : cumulative[r - 1]);
    };
    // A draw landing exactly on a shared boundary can select a zero-mass
    // row; the owner is the next row with positive mass.
    while (i + 1 < n && mass(i) <= 0.0) ++i;
    const double pi = mass(i) / total;
    out.indices[t] = i;
    out.weights[t] = 1.0 / std::sqrt(sd * pi);
  }
  return out;
}

DenseMatrix sample_rows(const RowSampler& sampler, const DenseMatrix& x) {
  if (x.rows() != sampler.source_rows)
    throw std::invalid_argument("sample_rows: row count mismatch");
  DenseMatrix out(sampler.indices.size(), x.cols());
  for (std::size_t t = 0; t < sampler.indices.size(); ++t) {
    const double* xr = x.row_ptr(sampler.indices[t]);
    double* ot = out.row_ptr(t);
    for (std::size_t j = 0; j < x.cols(); ++j) ot[j] = sampler.weights[t] * xr[j];
  }
  return out;
}

DenseMatrix sampled_least_squares(const DenseMatrix& z, const DenseMatrix& y,
                                  const RowSampler& sampler) {
  if (z.rows() != y.rows())
    throw std::invalid_argument("sampled_least_squares: row mismatch");
  DenseMatrix sz = sample_rows(sampler, z);
  DenseMatrix sy = sample_rows(sampler, y);
  return least_squares(sz, sy);
}

}  // namespace klra::sketch
