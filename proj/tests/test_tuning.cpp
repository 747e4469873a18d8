#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nsi/nsi.hpp"
#include "nsi/tuning.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace nsi;
using nsi::testing::orthonormal_design;
using nsi::testing::random_matrix;
using nsi::testing::random_vector;

namespace {

Dataset dataset_of(Vector y, Matrix Z, Matrix W) {
  Dataset d;
  d.y = std::move(y);
  d.Z = std::move(Z);
  d.W = std::move(W);
  return d;
}

Fitter nsi_fitter(NsiConfig base = {}) {
  return [base](const Dataset& d, const PrecisionEstimate& om, double lambda) {
    NsiConfig c = base;
    c.lambda = lambda;
    return nsi_fit(d, om, c).estimate;
  };
}

}  // namespace

TEST_CASE("kfold_split fold sizes and determinism") {
  const auto singletons = kfold_split(10, 10, 1);
  std::vector<int> counts10(10, 0);
  for (int f : singletons) counts10[static_cast<size_t>(f)]++;
  for (int c : counts10) CHECK(c == 1);

  const auto tens = kfold_split(100, 10, 2);
  std::vector<int> counts(10, 0);
  for (int f : tens) {
    REQUIRE(f >= 0);
    REQUIRE(f < 10);
    counts[static_cast<size_t>(f)]++;
  }
  for (int c : counts) CHECK(c == 10);

  const auto uneven = kfold_split(7, 3, 3);
  std::vector<int> c3(3, 0);
  for (int f : uneven) c3[static_cast<size_t>(f)]++;
  std::sort(c3.begin(), c3.end());
  CHECK(c3[0] == 2);
  CHECK(c3[2] == 3);

  CHECK(kfold_split(50, 5, 9) == kfold_split(50, 5, 9));
  CHECK(kfold_split(50, 5, 9) != kfold_split(50, 5, 10));
  CHECK_THROWS_AS(kfold_split(10, 1, 0), InvalidInputError);
  CHECK_THROWS_AS(kfold_split(5, 6, 0), InvalidInputError);
}

TEST_CASE("default lambda grid shape") {
  RngStream rng(81);
  const Dataset data = dataset_of(random_vector(30, rng, 2.0), random_matrix(30, 4, rng),
                                  random_matrix(30, 3, rng));
  const auto grid = default_lambda_grid(data, 50, 1e-3);
  REQUIRE(grid.size() == 50);
  for (size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] < grid[i - 1]);

  double lambda_max = 0.0;
  auto scan = [&](const Matrix& x) {
    for (Index k = 0; k < x.cols(); ++k) {
      const double s = std::sqrt(x.col(k).squaredNorm() / 30.0);
      lambda_max = std::max(lambda_max, std::abs(x.col(k).dot(data.y) / 30.0) / s);
    }
  };
  scan(data.Z);
  scan(data.W);
  CHECK(grid.front() == doctest::Approx(lambda_max).epsilon(1e-15));
  CHECK(grid.back() == doctest::Approx(1e-3 * lambda_max).epsilon(1e-12));

  const auto tiny = default_lambda_grid(data, 1, 1e-3);
  CHECK(tiny.size() == 1);
}

TEST_CASE("cv_lambda single and duplicate grids") {
  RngStream rng(82);
  const Dataset data = dataset_of(random_vector(24, rng, 2.0), random_matrix(24, 3, rng),
                                  random_matrix(24, 2, rng));
  const auto omega = identity_precision(2);

  const auto single = cv_lambda(data, omega, {0.4}, 4, 7, nsi_fitter());
  CHECK(single.best_lambda == 0.4);
  CHECK(single.cv_error.size() == 1);

  const auto dup = cv_lambda(data, omega, {0.4, 0.1, 0.4, 0.1}, 4, 7, nsi_fitter());
  REQUIRE(dup.lambda_grid.size() == 4);
  CHECK(dup.lambda_grid[0] == 0.4);
  CHECK(dup.lambda_grid[1] == 0.4);
  CHECK(dup.cv_error[0] == dup.cv_error[1]);
  CHECK(dup.cv_error[2] == dup.cv_error[3]);

  // all-equal errors break the tie to the smallest lambda
  const auto flat = cv_lambda(data, omega, {0.2, 0.2, 0.2}, 4, 7,
                              [](const Dataset& d, const PrecisionEstimate&, double) {
                                CoefficientEstimate est;
                                est.beta_hat = Vector::Zero(d.p());
                                est.gamma_hat = Vector::Zero(d.q());
                                return est;
                              });
  CHECK(flat.best_lambda == 0.2);
  CHECK(flat.cv_error[0] == flat.cv_error[1]);
}

TEST_CASE("cv prefers small lambda on a strong noiseless signal") {
  RngStream rng(83);
  const Index n = 40, p = 3, q = 3;
  const Matrix joint = orthonormal_design(n, p + q, rng);
  Vector beta(p), gamma(q);
  beta << 3.0, -2.0, 0.0;
  gamma << 2.0, 1.0, -1.5;
  const Matrix z = joint.leftCols(p);
  const Matrix w = joint.rightCols(q);
  const Vector y = z * beta + w * gamma;
  const auto result =
      cv_lambda(dataset_of(y, z, w), identity_precision(q), {10.0, 0.001}, 5, 11, nsi_fitter());
  CHECK(result.best_lambda == 0.001);
}

TEST_CASE("cv_lambda is deterministic") {
  RngStream rng(84);
  const Dataset data = dataset_of(random_vector(30, rng, 2.0), random_matrix(30, 4, rng),
                                  random_matrix(30, 3, rng));
  const auto omega = identity_precision(3);
  const auto grid = default_lambda_grid(data, 8, 1e-2);
  const auto a = cv_lambda(data, omega, grid, 5, 21, nsi_fitter());
  const auto b = cv_lambda(data, omega, grid, 5, 21, nsi_fitter());
  CHECK(a.best_lambda == b.best_lambda);
  CHECK(a.cv_error == b.cv_error);
  CHECK(a.fold_assignment == b.fold_assignment);
}

TEST_CASE("fold partition inside cv matches kfold_split") {
  RngStream rng(85);
  const Dataset data = dataset_of(random_vector(20, rng), random_matrix(20, 2, rng),
                                  random_matrix(20, 2, rng));
  const auto result =
      cv_lambda(data, identity_precision(2), {0.5}, 4, 33, nsi_fitter());
  CHECK(result.fold_assignment == kfold_split(20, 4, 33));
}

TEST_CASE("fit failures are reported with lambda and fold") {
  RngStream rng(86);
  const Dataset data = dataset_of(random_vector(20, rng), random_matrix(20, 2, rng),
                                  random_matrix(20, 2, rng));
  const Fitter flaky = [](const Dataset& d, const PrecisionEstimate& om, double lambda) {
    if (lambda < 0.1) throw NumericalError("synthetic failure");
    NsiConfig c;
    c.lambda = lambda;
    return nsi_fit(d, om, c).estimate;
  };
  try {
    cv_lambda(data, identity_precision(2), {0.5, 0.01}, 4, 3, flaky);
    FAIL("expected PipelineError");
  } catch (const PipelineError& e) {
    const std::string what = e.what();
    CHECK(what.find("lambda=0.01") != std::string::npos);
    CHECK(what.find("fold=0") != std::string::npos);
  }
  CHECK_THROWS_AS(cv_lambda(data, identity_precision(2), {}, 4, 3, nsi_fitter()),
                  InvalidInputError);
  CHECK_THROWS_AS(cv_lambda(data, identity_precision(2), {-0.1}, 4, 3, nsi_fitter()),
                  InvalidInputError);
}
