#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nsi/linalg.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace nsi;
using nsi::testing::random_matrix;
using nsi::testing::random_spd;
using nsi::testing::random_vector;

TEST_CASE("cholesky identity and a hand-checked 2x2") {
  const auto eye = cholesky(SymmetricMatrix::identity(3));
  CHECK((eye.L - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);

  Matrix s(2, 2);
  s << 4, 2, 2, 5;
  const auto factor = cholesky(SymmetricMatrix::from(s));
  CHECK(factor.L(0, 0) == doctest::Approx(2.0));
  CHECK(factor.L(1, 0) == doctest::Approx(1.0));
  CHECK(factor.L(1, 1) == doctest::Approx(2.0));
  CHECK(factor.L(0, 1) == 0.0);
  CHECK((factor.L * factor.L.transpose() - s).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("cholesky rejects indefinite input") {
  Matrix s(2, 2);
  s << 1, 2, 2, 1;  // eigenvalues 3 and -1
  CHECK_THROWS_AS(cholesky(SymmetricMatrix::from(s)), NotPositiveDefiniteError);
}

TEST_CASE("cholesky reconstruction across dimensions") {
  RngStream rng(21);
  for (Index dim : {2, 10, 50, 400}) {
    const Matrix s = random_spd(dim, rng);
    const auto factor = cholesky(SymmetricMatrix::from(s));
    const double rel =
        (factor.L * factor.L.transpose() - s).norm() / std::max(1.0, s.norm());
    CHECK(rel <= 1e-10);
  }
}

TEST_CASE("spd_inverse on the analytic 2x2") {
  const auto inv_eye = spd_inverse(SymmetricMatrix::identity(4));
  CHECK((inv_eye.mat() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);

  Matrix s(2, 2);
  s << 1, 0.5, 0.5, 1;  // determinant 0.75
  const auto inv = spd_inverse(SymmetricMatrix::from(s));
  CHECK(inv(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(inv(0, 1) == doctest::Approx(-2.0 / 3.0).epsilon(1e-12));
  CHECK(inv(1, 1) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("spd_inverse residual and involution") {
  RngStream rng(22);
  const Matrix s = random_spd(5, rng);
  const SymmetricMatrix sym = SymmetricMatrix::from(s);
  const auto inv = spd_inverse(sym);
  CHECK((s * inv.mat() - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-8);
  const auto round_trip = spd_inverse(inv);
  CHECK((round_trip.mat() - s).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK_THROWS_AS(spd_inverse(SymmetricMatrix::symmetrized(Matrix::Zero(3, 3))),
                  NotPositiveDefiniteError);
}

TEST_CASE("sample_covariance closed forms") {
  const Matrix w = 2.0 * Matrix::Identity(4, 4);  // sqrt(n) * I with n = 4
  CHECK((sample_covariance(w).mat() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);

  Matrix row(1, 2);
  row << 1, 2;
  const auto outer = sample_covariance(row);
  CHECK(outer(0, 0) == 1.0);
  CHECK(outer(0, 1) == 2.0);
  CHECK(outer(1, 1) == 4.0);
}

TEST_CASE("sample_covariance is positive semi-definite") {
  RngStream rng(23);
  const Matrix w = random_matrix(6, 9, rng);  // rank-deficient: q > n
  const auto s = sample_covariance(w);
  for (int rep = 0; rep < 10; ++rep) {
    const Vector v = random_vector(9, rng);
    CHECK(v.dot(s.mat() * v) >= -1e-10);
  }
  // centering flag removes the mean
  Matrix shifted = w;
  shifted.col(0).array() += 100.0;
  const auto centered = sample_covariance(shifted, true);
  Matrix manual = shifted.rowwise() - shifted.colwise().mean();
  const Matrix expected = manual.transpose() * manual / 6.0;
  CHECK((centered.mat() - expected).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("gaussian_sample covariance consistency at n = 20000") {
  Matrix sigma(4, 4);
  sigma << 2.0, 0.6, 0.2, 0.0,
           0.6, 1.5, 0.3, 0.1,
           0.2, 0.3, 1.2, 0.4,
           0.0, 0.1, 0.4, 1.0;
  const auto chol = cholesky(SymmetricMatrix::from(sigma));
  RngStream rng(24);
  const Matrix x = gaussian_sample(chol, 20000, rng);
  const auto s = sample_covariance(x);
  CHECK((s.mat() - sigma).cwiseAbs().maxCoeff() < 0.05);

  // identity case from the same machinery
  RngStream rng2(25);
  const Matrix z = gaussian_sample(cholesky(SymmetricMatrix::identity(4)), 20000, rng2);
  CHECK((sample_covariance(z).mat() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("gaussian_sample determinism") {
  const auto chol = cholesky(SymmetricMatrix::identity(3));
  RngStream a(42), b(42), c(43);
  const Matrix xa = gaussian_sample(chol, 8, a);
  const Matrix xb = gaussian_sample(chol, 8, b);
  const Matrix xc = gaussian_sample(chol, 8, c);
  CHECK((xa - xb).cwiseAbs().maxCoeff() == 0.0);
  CHECK((xa - xc).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("rng streams") {
  RngStream parent(7);
  RngStream advanced(7);
  for (int i = 0; i < 5; ++i) advanced.next_u64();
  // substreams depend only on the key, not the parent position
  RngStream s1 = parent.substream(3);
  RngStream s2 = advanced.substream(3);
  for (int i = 0; i < 4; ++i) CHECK(s1.next_u64() == s2.next_u64());

  RngStream u(8);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.next_uniform();
    CHECK(x > 0.0);
    CHECK(x < 1.0);
  }
  RngStream nstream(9);
  double sum = 0.0, sum_sq = 0.0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const double z = nstream.next_normal();
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / draws;
  const double var = sum_sq / draws - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.03);

  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
}

TEST_CASE("symmetric matrix validation") {
  Matrix bad(2, 3);
  CHECK_THROWS_AS(SymmetricMatrix::from(bad), InvalidInputError);
  Matrix asym(2, 2);
  asym << 1, 2, 0, 1;
  CHECK_THROWS_AS(SymmetricMatrix::from(asym), InvalidInputError);
  // near-symmetry within tolerance is accepted and symmetrized exactly
  Matrix almost = Matrix::Identity(2, 2);
  almost(0, 1) = 1e-12;
  const auto sym = SymmetricMatrix::from(almost);
  CHECK(sym(0, 1) == sym(1, 0));
}
