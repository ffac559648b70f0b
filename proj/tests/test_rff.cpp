#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "klra/factor.hpp"
#include "klra/kernels.hpp"
#include "klra/rff.hpp"
#include "klra/spectral.hpp"
#include "support.hpp"

using namespace klra;
using namespace klra::rff;
using test_support::ks_statistic;
using test_support::random_dense;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

TEST_CASE("fourier density inverts to the kernel") {
  auto g1 = KernelSpec::gaussian(1);
  CHECK(fourier_density_check(g1, 1, {0.0}) <= 1e-9);

  std::vector<double> grid;
  for (int i = 0; i <= 30; ++i) grid.push_back(0.1 * i);
  CHECK(fourier_density_check(g1, 1, grid) <= 1e-6);

  auto g4 = KernelSpec::gaussian(4);
  CHECK(fourier_density_check(g4, 1, {1.0}) <= 1e-6);

  CHECK_THROWS_AS(fourier_density_check(KernelSpec::linear(), 1, {0.0}),
                  std::invalid_argument);
}

TEST_CASE("frequency sampling distribution") {
  auto density = RadialDensity::for_kernel(KernelSpec::gaussian(1));
  CHECK(density.coord_variance ==
        doctest::Approx(1.0 / (2.0 * kPi * kPi)));

  SeededRng rng(31);
  const std::size_t s = 10000, d = 3;
  auto sample = sample_frequencies(density, d, s, rng);
  for (std::size_t c = 0; c < d; ++c) {
    double var = 0;
    for (std::size_t m = 0; m < s; ++m)
      var += sample.frequencies(m, c) * sample.frequencies(m, c);
    var /= static_cast<double>(s);
    CHECK(var == doctest::Approx(density.coord_variance).epsilon(0.05));
  }

  SeededRng r1(7), r2(7);
  auto a = sample_frequencies(density, 2, 50, r1);
  auto b = sample_frequencies(density, 2, 50, r2);
  CHECK(a.frequencies.data() == b.frequencies.data());
}

TEST_CASE("frequency norms follow the half-normal law in one dimension") {
  const double sigma = 1.0;
  auto density = RadialDensity::for_kernel(KernelSpec::gaussian(sigma));
  SeededRng rng(33);
  const std::size_t s = 10000;
  auto sample = sample_frequencies(density, 1, s, rng);
  std::vector<double> mags(s);
  for (std::size_t m = 0; m < s; ++m)
    mags[m] = std::fabs(sample.frequencies(m, 0));
  const double scale = 1.0 / (kPi * std::sqrt(2.0 * sigma));
  auto half_normal_cdf = [&](double x) {
    return std::erf(x / (scale * std::sqrt(2.0)));
  };
  CHECK(ks_statistic(std::move(mags), half_normal_cdf) < 0.02);
}

TEST_CASE("feature matrix of the origin point") {
  SparseMatrix a = SparseMatrix::from_triplets(1, 3, {});
  auto density = RadialDensity::for_kernel(KernelSpec::gaussian(1));
  SeededRng rng(35);
  auto freqs = sample_frequencies(density, 3, 16, rng);
  auto z = feature_matrix(a, freqs);
  const double expect = 1.0 / std::sqrt(16.0);
  double row_norm_sq = 0;
  for (std::size_t m = 0; m < 16; ++m) {
    CHECK(z.entries(0, 2 * m) == doctest::Approx(expect));
    CHECK(z.entries(0, 2 * m + 1) == doctest::Approx(0.0));
    row_norm_sq += z.entries(0, 2 * m) * z.entries(0, 2 * m) +
                   z.entries(0, 2 * m + 1) * z.entries(0, 2 * m + 1);
  }
  CHECK(row_norm_sq == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("feature rows have unit norm for any input") {
  SeededRng rng(37);
  DenseMatrix pts = random_dense(7, 4, rng);
  auto density = RadialDensity::for_kernel(KernelSpec::gaussian(2));
  auto freqs = sample_frequencies(density, 4, 9, rng);
  auto z = feature_matrix(pts, freqs);
  DenseMatrix zzt = matmul_nt(z.entries, z.entries);
  for (std::size_t i = 0; i < 7; ++i)
    CHECK(zzt(i, i) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("feature products converge to the kernel value") {
  DenseMatrix pts{{0.0, 0.0}, {0.6, -0.3}};
  const double dist_sq = 0.36 + 0.09;
  auto density = RadialDensity::for_kernel(KernelSpec::gaussian(1));
  SeededRng rng(39);
  auto freqs = sample_frequencies(density, 2, 10000, rng);
  auto z = feature_matrix(pts, freqs);
  DenseMatrix zzt = matmul_nt(z.entries, z.entries);
  CHECK(zzt(0, 1) == doctest::Approx(std::exp(-dist_sq)).epsilon(0.05));
}

TEST_CASE("feature unbiasedness over repeated draws") {
  SeededRng rng(41);
  DenseMatrix pts = random_dense(5, 3, rng, 0.6);
  auto spec = KernelSpec::gaussian(1);
  auto k = kernel_matrix(spec, pts);
  auto density = RadialDensity::for_kernel(spec);

  const int reps = 200;
  const std::size_t s = 64;
  DenseMatrix mean(5, 5);
  for (int r = 0; r < reps; ++r) {
    SeededRng child = rng.derive(r);
    auto freqs = sample_frequencies(density, 3, s, child);
    auto z = feature_matrix(pts, freqs);
    mean = mean + matmul_nt(z.entries, z.entries);
  }
  const double tol = 4.0 / std::sqrt(static_cast<double>(reps) * s);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j)
      CHECK(std::fabs(mean(i, j) / reps - k.entries(i, j)) <= tol);
}

TEST_CASE("ridge leverage closed form for a single origin point") {
  DenseMatrix pts(1, 1);  // a = 0
  auto spec = KernelSpec::gaussian(1);
  auto k = kernel_matrix(spec, pts);
  auto density = RadialDensity::for_kernel(spec);
  for (double lambda : {0.1, 1.0, 7.5}) {
    RidgeLeverage tau(spec, pts, k, lambda);
    for (double eta : {0.0, 0.1, 0.5}) {
      std::vector<double> e{eta};
      const double p = density.density(e);
      CHECK(tau(e) == doctest::Approx(p / (1.0 + lambda)).epsilon(1e-10));
    }
  }
}

TEST_CASE("ridge leverage asymptote and bound") {
  DenseMatrix pts(1, 1);
  auto spec = KernelSpec::gaussian(1);
  auto k = kernel_matrix(spec, pts);
  auto density = RadialDensity::for_kernel(spec);
  const double lambda = 1e6;
  RidgeLeverage tau(spec, pts, k, lambda);
  std::vector<double> e{0.2};
  CHECK(tau(e) ==
        doctest::Approx(density.density(e) / lambda).epsilon(1e-4));

  // The density-normalized quadratic form is bounded by n/lambda for every
  // eta and every kernel width.
  SeededRng rng(43);
  DenseMatrix cloud = random_dense(12, 3, rng, 0.8);
  auto kc = kernel_matrix(spec, cloud);
  for (double lam : {0.1, 1.0, 10.0}) {
    RidgeLeverage leverage(spec, cloud, kc, lam);
    auto freqs = sample_frequencies(density, 3, 200, rng);
    for (std::size_t m = 0; m < 200; ++m) {
      std::vector<double> eta(3);
      for (std::size_t t = 0; t < 3; ++t) eta[t] = freqs.frequencies(m, t);
      CHECK(leverage.quadratic_form(eta) <= 12.0 / lam * (1 + 1e-9));
    }
  }

  // The full tau obeys the same bound whenever the Fourier density stays
  // below 1, which for the gaussian kernel means sigma <= 1/pi.
  auto narrow = KernelSpec::gaussian(0.25);
  auto narrow_density = RadialDensity::for_kernel(narrow);
  auto kn = kernel_matrix(narrow, cloud);
  for (double lam : {0.1, 1.0, 10.0}) {
    RidgeLeverage leverage(narrow, cloud, kn, lam);
    auto freqs = sample_frequencies(narrow_density, 3, 200, rng);
    for (std::size_t m = 0; m < 200; ++m) {
      std::vector<double> eta(3);
      for (std::size_t t = 0; t < 3; ++t) eta[t] = freqs.frequencies(m, t);
      CHECK(leverage(eta) <= 12.0 / lam * (1 + 1e-9));
    }
  }
}

TEST_CASE("pcp sample size formula") {
  CHECK(pcp_sample_size(100, 1.0, 0.5, 0.01, 1.0) == 3685);

  // Halving epsilon quadruples the raw count.
  const double raw1 = 1.0 * 100 * std::log(100 / (0.01 * 1.0)) / (0.25 * 1.0);
  const double raw2 =
      1.0 * 100 * std::log(100 / (0.01 * 1.0)) / (0.0625 * 1.0);
  CHECK(raw2 == doctest::Approx(4.0 * raw1));
  CHECK(pcp_sample_size(100, 1.0, 0.25, 0.01, 1.0) ==
        static_cast<std::size_t>(std::ceil(raw2)));

  // lambda = n/(delta e) makes the log argument e.
  const double n = 50;
  const double delta = 0.02;
  const double lambda = n / (delta * std::exp(1.0));
  const double expect = std::ceil(2.0 * n / (0.25 * lambda));
  CHECK(pcp_sample_size(50, lambda, 0.5, delta, 2.0) ==
        static_cast<std::size_t>(expect));

  CHECK(pcp_sample_size(2, 1e9, 0.5, 0.5, 1.0) == 1);  // floored
  CHECK_THROWS_AS(pcp_sample_size(10, 0.0, 0.5, 0.01, 1.0),
                  std::invalid_argument);
}

TEST_CASE("pcp check sandwich") {
  SeededRng rng(45);
  DenseMatrix pts = random_dense(6, 2, rng, 0.5);
  auto spec = KernelSpec::gaussian(1);
  auto density = RadialDensity::for_kernel(spec);
  auto freqs = sample_frequencies(density, 2, 32, rng);
  auto z = feature_matrix(pts, freqs);

  // Using Ztilde Ztilde^T as the "kernel", the sketch is its own feature
  // map, so the sandwich holds at epsilon = 0.
  KernelMatrix self{matmul_nt(z.entries, z.entries), spec};
  DenseMatrix q = test_support::random_orthonormal(6, 2, rng);
  auto res = pcp_check(self, z, q, 0.0);
  CHECK(res.holds);
  CHECK(res.sketch_cost == doctest::Approx(res.true_cost).epsilon(1e-9));

  // Empty basis: both sides equal n when psi(x,x) = 1.
  auto k = kernel_matrix(spec, pts);
  auto empty = pcp_check(k, z, DenseMatrix(6, 0), 0.0);
  CHECK(empty.sketch_cost == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(empty.true_cost == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(empty.holds);
}

TEST_CASE("pcp sandwich holds on an oversampled instance") {
  // Desk-scale version of the acceptance run: n = 24, k = 2, c = 4.
  SeededRng rng(47);
  DenseMatrix pts = random_dense(24, 4, rng, 0.9);
  auto spec = KernelSpec::gaussian(1);
  auto k = kernel_matrix(spec, pts);
  const double lambda = spectral_tail_threshold(k, 2) / 2.0;
  const double eps = 0.5;
  const std::size_t s = pcp_sample_size(24, lambda, eps, 0.01, 4.0);
  auto density = RadialDensity::for_kernel(spec);

  int ok = 0;
  const int seeds = 20;
  for (int t = 0; t < seeds; ++t) {
    SeededRng child = rng.derive(t);
    auto freqs = sample_frequencies(density, 4, s, child);
    auto z = feature_matrix(pts, freqs);
    DenseMatrix zzt = matmul_nt(z.entries, z.entries);
    auto eig = symmetric_eig(zzt);
    DenseMatrix q(24, 2);
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t i = 0; i < 24; ++i) q(i, j) = eig.vectors(i, j);
    if (pcp_check(k, z, q, eps).holds) ++ok;
  }
  CHECK(ok >= 19);
}
