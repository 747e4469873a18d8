#pragma once

#include "nsi/precision.hpp"
#include "nsi/types.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace nsi {

struct CvResult {
  std::vector<double> lambda_grid;  // descending
  std::vector<double> cv_error;     // mean held-out MSE per lambda
  double best_lambda = 0.0;
  std::vector<int> fold_assignment;
};

/// Assign each of n indices to one of k folds; fold sizes differ by at most
/// one. Deterministic given the seed.
std::vector<int> kfold_split(Index n, int k, std::uint64_t seed);

/// 50 log-spaced values (descending) from lambda_max down to
/// min_ratio * lambda_max, where lambda_max = max_k |x_k^T y| / n over the
/// standardized joint design [Z W].
std::vector<double> default_lambda_grid(const Dataset& data, int size = 50,
                                        double min_ratio = 1e-3);

using Fitter =
    std::function<CoefficientEstimate(const Dataset&, const PrecisionEstimate&, double lambda)>;

/// For each lambda and fold: fit on the other k-1 folds and score the
/// held-out rows by MSE of Z beta + W gamma against y. The precision estimate
/// is shared across folds. Ties in cv_error break to the smallest lambda.
/// A failing fold fit raises PipelineError naming (lambda, fold).
CvResult cv_lambda(const Dataset& data, const PrecisionEstimate& omega,
                   std::vector<double> grid, int k, std::uint64_t seed, const Fitter& fitter);

}  // namespace nsi
