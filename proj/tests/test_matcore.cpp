#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "klra/factor.hpp"
#include "klra/matrix.hpp"
#include "klra/sparse.hpp"
#include "klra/spectral.hpp"
#include "support.hpp"

using namespace klra;
using test_support::naive_gram;
using test_support::random_dense;
using test_support::random_sparse;

TEST_CASE("frobenius norm") {
  CHECK(frobenius_norm(DenseMatrix{{3, 4}}) == doctest::Approx(5.0));
  CHECK(frobenius_norm(DenseMatrix(4, 7)) == 0.0);
  CHECK(frobenius_norm(DenseMatrix{{1, 1}, {1, 1}}) == doctest::Approx(2.0));
}

TEST_CASE("gram matches hand arithmetic") {
  auto a = SparseMatrix::from_dense(DenseMatrix{{1, 2}, {0, 3}});
  DenseMatrix g = gram(a);
  CHECK(g(0, 0) == doctest::Approx(5));
  CHECK(g(0, 1) == doctest::Approx(6));
  CHECK(g(1, 0) == doctest::Approx(6));
  CHECK(g(1, 1) == doctest::Approx(9));
}

TEST_CASE("gram of identity and zero rows") {
  auto eye = SparseMatrix::from_dense(DenseMatrix::identity(2));
  DenseMatrix g = gram(eye);
  CHECK(frobenius_norm(g - DenseMatrix::identity(2)) == doctest::Approx(0));

  DenseMatrix with_zero_row{{1, 2}, {0, 0}, {3, 4}};
  DenseMatrix gz = gram(SparseMatrix::from_dense(with_zero_row));
  for (std::size_t t = 0; t < 3; ++t) {
    CHECK(gz(1, t) == 0.0);
    CHECK(gz(t, 1) == 0.0);
  }
}

TEST_CASE("gram equals the naive triple loop on random instances") {
  SeededRng rng(42);
  for (int trial = 0; trial < 8; ++trial) {
    const std::size_t n = 5 + rng.below(46);
    const std::size_t d = 3 + rng.below(48);
    SparseMatrix a = random_sparse(n, d, 0.3, rng);
    DenseMatrix expected = naive_gram(a.to_dense());
    CHECK(frobenius_norm(gram(a) - expected) <=
          1e-12 * (1.0 + frobenius_norm(expected)));
  }
}

TEST_CASE("symmetric_eig on fixed spectra") {
  auto eig = symmetric_eig(DenseMatrix{{3, 0}, {0, 1}});
  CHECK(eig.values[0] == doctest::Approx(3));
  CHECK(eig.values[1] == doctest::Approx(1));
  CHECK(std::fabs(eig.vectors(0, 0)) == doctest::Approx(1));
  CHECK(std::fabs(eig.vectors(1, 1)) == doctest::Approx(1));

  auto ones = symmetric_eig(DenseMatrix{{1, 1}, {1, 1}});
  CHECK(ones.values[0] == doctest::Approx(2));
  CHECK(ones.values[1] == doctest::Approx(0).epsilon(1e-12));

  auto ident = symmetric_eig(DenseMatrix::identity(5));
  for (double v : ident.values) CHECK(v == doctest::Approx(1));

  CHECK_THROWS_AS(symmetric_eig(DenseMatrix(2, 3)), std::invalid_argument);
}

TEST_CASE("symmetric_eig reconstructs within tolerance") {
  SeededRng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t n = 3 + rng.below(30);
    DenseMatrix m = random_dense(n, n, rng);
    DenseMatrix k = m + transpose(m);
    auto eig = symmetric_eig(k);
    DenseMatrix lam(n, n);
    for (std::size_t i = 0; i < n; ++i) lam(i, i) = eig.values[i];
    DenseMatrix recon = matmul(matmul(eig.vectors, lam), transpose(eig.vectors));
    CHECK(frobenius_norm(k - recon) <= 1e-8 * frobenius_norm(k));
    DenseMatrix gram_v = matmul_tn(eig.vectors, eig.vectors);
    CHECK(frobenius_norm(gram_v - DenseMatrix::identity(n)) <= 1e-10);
  }
}

TEST_CASE("best_rank_k residuals") {
  SeededRng rng(11);
  DenseMatrix u = random_dense(6, 1, rng);
  DenseMatrix v = random_dense(5, 1, rng);
  DenseMatrix rank1 = matmul_nt(u, v);
  auto f1 = best_rank_k(rank1, 1);
  CHECK(frobenius_norm(rank1 - f1.reconstruct()) <=
        1e-10 * frobenius_norm(rank1));

  DenseMatrix d3{{3, 0, 0}, {0, 2, 0}, {0, 0, 1}};
  auto f2 = best_rank_k(d3, 2);
  CHECK(frobenius_norm(d3 - f2.reconstruct()) == doctest::Approx(1.0));

  DenseMatrix any = random_dense(4, 7, rng);
  auto f3 = best_rank_k(any, 4);
  CHECK(frobenius_norm(any - f3.reconstruct()) <=
        1e-10 * frobenius_norm(any));

  CHECK_THROWS_AS(best_rank_k(any, 0), std::invalid_argument);
  CHECK_THROWS_AS(best_rank_k(any, 5), std::invalid_argument);
}

TEST_CASE("best_rank_k residual equals the singular tail") {
  SeededRng rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t n = 4 + rng.below(10);
    const std::size_t m = 4 + rng.below(10);
    DenseMatrix a = random_dense(n, m, rng);
    auto svd = jacobi_svd(a);
    for (std::size_t k = 1; k <= std::min(n, m); k += 2) {
      double tail = 0;
      for (std::size_t i = k; i < svd.sigma.size(); ++i)
        tail += svd.sigma[i] * svd.sigma[i];
      const double resid = frobenius_norm(a - best_rank_k(a, k).reconstruct());
      CHECK(resid == doctest::Approx(std::sqrt(tail)).epsilon(1e-8));
    }
  }
}

TEST_CASE("projection_cost identities") {
  SeededRng rng(17);
  DenseMatrix m = random_dense(6, 6, rng);
  DenseMatrix k = matmul_nt(m, m);  // PSD
  auto eig = symmetric_eig(k);

  const std::size_t rank = 2;
  DenseMatrix top(6, rank);
  for (std::size_t j = 0; j < rank; ++j)
    for (std::size_t i = 0; i < 6; ++i) top(i, j) = eig.vectors(i, j);
  double tail = 0;
  for (std::size_t i = rank; i < 6; ++i) tail += eig.values[i];
  CHECK(projection_cost(k, top) == doctest::Approx(tail).epsilon(1e-9));

  // K = Q Q^T for orthonormal Q: cost vanishes.
  DenseMatrix q = test_support::random_orthonormal(6, 3, rng);
  DenseMatrix kq = matmul_nt(q, q);
  CHECK(projection_cost(kq, q) == doctest::Approx(0).epsilon(1e-12));

  DenseMatrix e1(2, 1);
  e1(0, 0) = 1;
  CHECK(projection_cost(DenseMatrix{{1, 0}, {0, 2}}, e1) ==
        doctest::Approx(2));

  CHECK_THROWS_AS(projection_cost(k, DenseMatrix(4, 2)),
                  std::invalid_argument);
}

TEST_CASE("projection_cost is minimized by the top eigenvectors") {
  SeededRng rng(19);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t n = 8;
    DenseMatrix m = random_dense(n, n, rng);
    DenseMatrix k = matmul_nt(m, m);
    auto eig = symmetric_eig(k);
    const std::size_t rank = 3;
    double tail = 0;
    for (std::size_t i = rank; i < n; ++i) tail += eig.values[i];
    DenseMatrix q = test_support::random_orthonormal(n, rank, rng);
    CHECK(projection_cost(k, q) >= tail - 1e-8 * trace(k));
  }
}

TEST_CASE("LowRankFactor validates orthonormality") {
  DenseMatrix not_ortho{{1, 0}, {0.5, 1}};
  CHECK_THROWS_AS(LowRankFactor::orthonormal_basis(not_ortho),
                  std::invalid_argument);
  auto ok = LowRankFactor::orthonormal_basis(DenseMatrix::identity(3));
  CHECK(ok.rank() == 3);
}

TEST_CASE("sparse canonical form") {
  std::vector<Triplet> trips{{0, 1, 2.0}, {0, 1, 3.0}, {1, 0, 1.0},
                             {0, 0, 4.0}, {1, 1, 0.0}};
  auto m = SparseMatrix::from_triplets(2, 2, trips);
  CHECK(m.nnz() == 3);  // duplicates summed, explicit zero dropped
  DenseMatrix d = m.to_dense();
  CHECK(d(0, 1) == 5.0);
  CHECK(d(0, 0) == 4.0);
  CHECK(d(1, 1) == 0.0);

  // Cancelling duplicates leave no stored entry.
  auto z = SparseMatrix::from_triplets(1, 1, {{0, 0, 1.0}, {0, 0, -1.0}});
  CHECK(z.nnz() == 0);

  CHECK_THROWS_AS(SparseMatrix::from_triplets(1, 1, {{0, 1, 1.0}}),
                  std::invalid_argument);
}
