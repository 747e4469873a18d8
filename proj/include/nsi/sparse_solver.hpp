#pragma once

#include "nsi/types.hpp"

#include <vector>

namespace nsi {

struct LassoConfig {
  double lambda = 0.0;
  int max_sweeps = 1000;
  /// Convergence: max absolute coefficient change over a full sweep, measured
  /// on the solver's working scale (standardized when standardize is set).
  double tol = 1e-7;
  /// Rescale columns to unit in-sample second moment internally; the penalty
  /// then acts on the standardized coefficients and results are
  /// back-transformed to the original scale.
  bool standardize = true;
};

/// sign(alpha) * max(|alpha| - threshold, 0).
double soft_threshold(double alpha, double threshold);

/// Cyclic coordinate descent for
///   (1/2n) ||y - offset - X b||_2^2 + lambda ||b||_1.
/// An empty offset is treated as zero. Columns with zero norm keep a zero
/// coefficient. The returned estimate has gamma_hat empty; final_objective is
/// the penalized objective on the working scale. When sweep_objectives is
/// given it receives the objective before the first sweep and after each
/// sweep (non-increasing).
CoefficientEstimate lasso_cd(const Vector& y, const Matrix& X, const Vector& offset,
                             const LassoConfig& config,
                             std::vector<double>* sweep_objectives = nullptr);

/// Max violation of the stationarity conditions of the raw-scale problem:
/// with g_k = X_k^T (y - offset - X beta) / n, returns
///   max_k |g_k - lambda sign(beta_k)|        for beta_k != 0,
///   max_k max(|g_k| - lambda, 0)             for beta_k == 0.
double kkt_violation(const Vector& y, const Matrix& X, const Vector& offset,
                     const Vector& beta, double lambda);

}  // namespace nsi
