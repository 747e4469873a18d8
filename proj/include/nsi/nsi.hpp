#pragma once

#include "nsi/precision.hpp"
#include "nsi/sparse_solver.hpp"
#include "nsi/types.hpp"

#include <vector>

namespace nsi {

struct NsiConfig {
  double lambda = 0.0;
  int max_outer_iter = 500;
  /// Max absolute coefficient change over a full (gamma then beta) sweep, on
  /// the working scale.
  double tol = 1e-7;
  /// Unit in-sample second moment for both blocks; the gamma coordinate step
  /// is the exact least-squares minimizer only on this scale.
  bool standardize = true;
  /// Magnitude below which a coordinate counts as zero in selection metrics.
  double zero_tol = 0.0;

  LassoConfig init_lasso() const { return LassoConfig{lambda, 1000, tol, standardize}; }
};

/// Fit plus convergence diagnostics. objective_trace holds the global loss
///   (1/2n) ||y - Z beta - W gamma||_2^2 + lambda ||beta||_1
/// on the working scale, one entry after initialization and one per outer
/// sweep; it is non-increasing because every coordinate update is an exact
/// single-coordinate minimizer of that loss. The residual diagnostics are
/// reported on the working scale and are not convergence gates.
struct FitResult {
  CoefficientEstimate estimate;
  std::vector<double> objective_trace;
  double gamma_stationarity = 0.0;  // max_j |W_j^T (y - Z beta - W gamma)| / n
  double beta_kkt = 0.0;            // lasso stationarity violation of the beta block
};

/// Initialization step: gamma0 = Omega W^T y / n on the raw scale, then
/// beta0 = argmin of the sparse loss with offset W gamma0.
CoefficientEstimate nsi_init(const Dataset& data, const PrecisionEstimate& omega,
                             const NsiConfig& config);

/// Full iteration: initialization followed by alternating full sweeps, all q
/// gamma coordinates (exact least-squares update on the partial residual)
/// then all p beta coordinates (soft-thresholded update), until the max
/// coefficient change over a sweep drops below tol or max_outer_iter is hit.
/// Omega enters through the initialization only. With q == 0 this delegates
/// to lasso_cd on (y, Z); with q >= n the gamma block is underdetermined and
/// the iteration cap applies.
FitResult nsi_fit(const Dataset& data, const PrecisionEstimate& omega, const NsiConfig& config);

/// Reference estimator defined with the true gamma: beta from the sparse
/// loss with offset W gamma, then gamma = Omega W^T (y - Z beta) / n.
CoefficientEstimate oracle_fit(const Dataset& data, const Vector& true_gamma,
                               const PrecisionEstimate& omega, double lambda);

/// Initialization-only baseline (non-iterative plug-in).
CoefficientEstimate plugin_fit(const Dataset& data, const PrecisionEstimate& omega,
                               double lambda);

}  // namespace nsi
