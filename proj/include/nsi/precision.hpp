#pragma once

#include "nsi/linalg.hpp"
#include "nsi/types.hpp"

#include <optional>

namespace nsi {

enum class PrecisionMethod { known, identity, ridge_inverse, graphical_lasso };

const char* to_string(PrecisionMethod method);

/// Estimate of the precision matrix of the W block. Construction runs a
/// Cholesky PD certificate and throws NotPositiveDefiniteError on failure.
struct PrecisionEstimate {
  SymmetricMatrix omega_hat;
  PrecisionMethod method;
  std::optional<double> lambda_star;
  bool converged = true;

  static PrecisionEstimate make(SymmetricMatrix omega, PrecisionMethod method,
                                std::optional<double> lambda_star = std::nullopt,
                                bool converged = true);

  Index dim() const { return omega_hat.dim(); }
};

/// q x q identity; the population precision of Example-1 style designs.
PrecisionEstimate identity_precision(Index q);

/// (S + eps I)^{-1}; always defined for eps > 0, the fallback when the sample
/// covariance is singular.
PrecisionEstimate ridge_inverse_precision(const SymmetricMatrix& S, double eps);

/// Wrap a known precision matrix (simulations).
PrecisionEstimate known_precision(const SymmetricMatrix& omega);

/// Constants of the graphical-lasso tuning rule
///   lambda* = 4 (M/alpha) ((log(n dim))^tau / n)^{1/2}.
struct GlassoRuleParams {
  double M = 1.0;
  double alpha = 1.0;  // in (0, 1]
  double tau = 1.5;    // > 1
  void validate() const;
};

/// The published rule is typographically ambiguous about what the exponent
/// applies to; both readings are supported.
enum class LambdaRuleParse {
  power_of_log,  // ((log(n dim))^tau / n)^{1/2}  -- default reading
  log_of_power   // (log((n dim)^tau) / n)^{1/2} == (tau log(n dim) / n)^{1/2}
};

double glasso_lambda_rule(Index n, Index dim, const GlassoRuleParams& params,
                          LambdaRuleParse parse = LambdaRuleParse::power_of_log);

/// L1-penalized precision estimation: maximizes
///   log det(Omega) - trace(S Omega) - lambda sum_{j != j'} |Omega_{jj'}|
/// by block coordinate descent over columns (Friedman-style), with the
/// diagonal unpenalized. Convergence is declared when the stationarity
/// residual reported by glasso_kkt_residual drops to tol; hitting max_iter
/// returns the best iterate with converged = false.
PrecisionEstimate graphical_lasso(const SymmetricMatrix& S, double lambda, int max_iter = 200,
                                  double tol = 1e-6);

/// Stationarity residual of a candidate glasso solution: with
/// Sigma = omega^{-1} and d = Sigma_{jj'} - S_{jj'}, the max over entries of
///   |d|                      on the diagonal,
///   max(|d| - lambda, 0)     for zero off-diagonals,
///   |d - lambda sign(omega_{jj'})|   for nonzero off-diagonals.
double glasso_kkt_residual(const SymmetricMatrix& S, const SymmetricMatrix& omega, double lambda);

}  // namespace nsi
