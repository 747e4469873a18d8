#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>

namespace nsi {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
/// Bad arguments: dimension mismatch, non-finite input, out-of-range option.
struct InvalidInputError : Error {
  using Error::Error;
};
/// A matrix required to be positive definite failed its Cholesky certificate.
struct NotPositiveDefiniteError : Error {
  using Error::Error;
};
/// A selection metric is undefined for this truth (no nulls / no non-nulls).
struct UndefinedMetricError : Error {
  using Error::Error;
};
/// Non-finite values produced while iterating.
struct NumericalError : Error {
  using Error::Error;
};
/// Malformed CSV / config file.
struct ParseError : Error {
  using Error::Error;
};
/// Harness-level failure (CV fold fit, replication budget, screening).
struct PipelineError : Error {
  using Error::Error;
};

/// Response vector plus the two design blocks: Z carries the sparse
/// coefficients, W the dense ones. Either block may be empty (0 columns),
/// but not both.
struct Dataset {
  Vector y;
  Matrix Z;  // n x p
  Matrix W;  // n x q

  Index n() const { return y.size(); }
  Index p() const { return Z.cols(); }
  Index q() const { return W.cols(); }

  /// Throws InvalidInputError unless rows agree, n >= 1, p + q >= 1 and all
  /// entries are finite.
  void validate() const;
};

/// Ground truth for simulated data.
struct TrueModel {
  Vector beta;
  Vector gamma;
  double sigma = 1.0;
  /// Precision matrix of the W block when known (simulations); symmetric PD.
  std::optional<Matrix> omega;

  Index support_size(double zero_tol = 0.0) const;
  void validate(const Dataset& data) const;
};

struct CoefficientEstimate {
  Vector beta_hat;
  Vector gamma_hat;
  double lambda = 0.0;
  int n_iterations = 0;
  bool converged = false;
  double final_objective = 0.0;
};

/// Evaluation of one fitted model against the truth. fpr/tpr are absent when
/// the truth has no null (resp. no non-null) coefficients.
struct MetricsReport {
  double l1 = 0.0;
  double l2 = 0.0;
  std::optional<double> fpr;
  std::optional<double> tpr;
  long nz = 0;
  std::optional<double> mse;
};

}  // namespace nsi
