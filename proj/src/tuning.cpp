#include "nsi/tuning.hpp"

#include "nsi/metrics.hpp"
#include "nsi/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace nsi {

std::vector<int> kfold_split(Index n, int k, std::uint64_t seed) {
  if (k < 2) throw InvalidInputError("kfold_split: k must be >= 2");
  if (static_cast<Index>(k) > n) throw InvalidInputError("kfold_split: k must not exceed n");
  std::vector<Index> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  RngStream rng(seed);
  for (Index i = n - 1; i > 0; --i) {
    const Index j = static_cast<Index>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(j)]);
  }
  std::vector<int> fold(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) {
    fold[static_cast<size_t>(perm[static_cast<size_t>(i)])] = static_cast<int>(i % k);
  }
  return fold;
}

std::vector<double> default_lambda_grid(const Dataset& data, int size, double min_ratio) {
  data.validate();
  if (size < 1) throw InvalidInputError("default_lambda_grid: size must be >= 1");
  if (!(min_ratio > 0.0 && min_ratio <= 1.0)) {
    throw InvalidInputError("default_lambda_grid: min_ratio must lie in (0, 1]");
  }
  const double dn = static_cast<double>(data.n());
  double lambda_max = 0.0;
  auto scan = [&](const Matrix& X) {
    for (Index k = 0; k < X.cols(); ++k) {
      const double ss = X.col(k).squaredNorm() / dn;
      if (ss <= 0.0) continue;
      lambda_max = std::max(lambda_max, std::abs(X.col(k).dot(data.y) / std::sqrt(ss)) / dn);
    }
  };
  scan(data.Z);
  scan(data.W);
  if (lambda_max <= 0.0) {
    return {0.0};
  }
  std::vector<double> grid(static_cast<size_t>(size));
  if (size == 1) {
    grid[0] = lambda_max;
    return grid;
  }
  const double log_max = std::log(lambda_max);
  const double log_min = std::log(lambda_max * min_ratio);
  for (int i = 0; i < size; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(size - 1);
    grid[static_cast<size_t>(i)] = std::exp(log_max + t * (log_min - log_max));
  }
  grid.front() = lambda_max;
  return grid;
}

namespace {

Dataset select_rows(const Dataset& data, const std::vector<Index>& rows) {
  Dataset out;
  out.y = Vector(static_cast<Index>(rows.size()));
  out.Z = Matrix(static_cast<Index>(rows.size()), data.p());
  out.W = Matrix(static_cast<Index>(rows.size()), data.q());
  for (size_t i = 0; i < rows.size(); ++i) {
    const Index r = rows[i];
    out.y[static_cast<Index>(i)] = data.y[r];
    if (data.p() > 0) out.Z.row(static_cast<Index>(i)) = data.Z.row(r);
    if (data.q() > 0) out.W.row(static_cast<Index>(i)) = data.W.row(r);
  }
  return out;
}

}  // namespace

CvResult cv_lambda(const Dataset& data, const PrecisionEstimate& omega, std::vector<double> grid,
                   int k, std::uint64_t seed, const Fitter& fitter) {
  data.validate();
  if (grid.empty()) throw InvalidInputError("cv_lambda: empty lambda grid");
  for (double lambda : grid) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
      throw InvalidInputError("cv_lambda: grid values must be finite and >= 0");
    }
  }
  if (!fitter) throw InvalidInputError("cv_lambda: missing fitter");
  std::sort(grid.begin(), grid.end(), std::greater<double>());

  CvResult result;
  result.fold_assignment = kfold_split(data.n(), k, seed);
  result.lambda_grid = grid;
  result.cv_error.assign(grid.size(), 0.0);

  std::vector<std::vector<Index>> train_rows(static_cast<size_t>(k));
  std::vector<std::vector<Index>> test_rows(static_cast<size_t>(k));
  for (Index i = 0; i < data.n(); ++i) {
    const int f = result.fold_assignment[static_cast<size_t>(i)];
    for (int g = 0; g < k; ++g) {
      (g == f ? test_rows : train_rows)[static_cast<size_t>(g)].push_back(i);
    }
  }

  for (int f = 0; f < k; ++f) {
    const Dataset train = select_rows(data, train_rows[static_cast<size_t>(f)]);
    const Dataset test = select_rows(data, test_rows[static_cast<size_t>(f)]);
    for (size_t li = 0; li < grid.size(); ++li) {
      CoefficientEstimate est;
      try {
        est = fitter(train, omega, grid[li]);
      } catch (const std::exception& e) {
        std::ostringstream msg;
        msg << "cv_lambda: fit failed at lambda=" << grid[li] << ", fold=" << f << ": "
            << e.what();
        throw PipelineError(msg.str());
      }
      Vector pred = Vector::Zero(test.n());
      if (test.p() > 0) pred += test.Z * est.beta_hat;
      if (test.q() > 0) pred += test.W * est.gamma_hat;
      result.cv_error[li] += mse(pred, test.y);
    }
  }
  for (double& e : result.cv_error) {
    e /= static_cast<double>(k);
  }

  size_t best = 0;
  for (size_t li = 1; li < grid.size(); ++li) {
    const bool better = result.cv_error[li] < result.cv_error[best];
    const bool tie_smaller_lambda =
        result.cv_error[li] == result.cv_error[best] && grid[li] < grid[best];
    if (better || tie_smaller_lambda) best = li;
  }
  result.best_lambda = grid[best];
  return result;
}

}  // namespace nsi
