#include "nsi/sparse_solver.hpp"

#include <cmath>
#include <sstream>

namespace nsi {

double soft_threshold(double alpha, double threshold) {
  if (alpha > threshold) return alpha - threshold;
  if (alpha < -threshold) return alpha + threshold;
  return 0.0;
}

namespace {

void check_lasso_inputs(const Vector& y, const Matrix& X, const Vector& offset,
                        const LassoConfig& config) {
  const Index n = y.size();
  if (n < 1) {
    throw InvalidInputError("lasso_cd: empty response");
  }
  if (X.rows() != n) {
    throw InvalidInputError("lasso_cd: X row count does not match y");
  }
  if (offset.size() != 0 && offset.size() != n) {
    throw InvalidInputError("lasso_cd: offset must be empty or length n");
  }
  if (!y.allFinite() || !X.allFinite() || !offset.allFinite()) {
    throw InvalidInputError("lasso_cd: non-finite inputs");
  }
  if (!(config.lambda >= 0.0) || !std::isfinite(config.lambda)) {
    throw InvalidInputError("lasso_cd: lambda must be finite and >= 0");
  }
  if (!(config.tol > 0.0)) {
    throw InvalidInputError("lasso_cd: tol must be > 0");
  }
  if (config.max_sweeps < 1) {
    throw InvalidInputError("lasso_cd: max_sweeps must be >= 1");
  }
}

}  // namespace

CoefficientEstimate lasso_cd(const Vector& y, const Matrix& X, const Vector& offset,
                             const LassoConfig& config, std::vector<double>* sweep_objectives) {
  check_lasso_inputs(y, X, offset, config);
  const Index n = y.size();
  const Index p = X.cols();
  const double dn = static_cast<double>(n);

  // Working copy: standardized columns have unit in-sample second moment, so
  // the coordinate update is the plain soft-threshold step. Null columns are
  // frozen at zero.
  Matrix Xw = X;
  Vector scale = Vector::Ones(p);
  Vector diag = Vector::Ones(p);  // X_k^T X_k / n on the working scale
  std::vector<bool> active(static_cast<size_t>(p), true);
  for (Index k = 0; k < p; ++k) {
    const double ss = X.col(k).squaredNorm() / dn;
    if (ss <= 0.0) {
      active[static_cast<size_t>(k)] = false;
      continue;
    }
    if (config.standardize) {
      scale[k] = std::sqrt(ss);
      Xw.col(k) /= scale[k];
    } else {
      diag[k] = ss;
    }
  }

  Vector b = Vector::Zero(p);
  Vector r = offset.size() == 0 ? Vector(y) : Vector(y - offset);

  auto objective = [&]() {
    return r.squaredNorm() / (2.0 * dn) + config.lambda * b.cwiseAbs().sum();
  };
  if (sweep_objectives) {
    sweep_objectives->clear();
    sweep_objectives->push_back(objective());
  }

  bool converged = false;
  int sweeps = 0;
  for (; sweeps < config.max_sweeps;) {
    ++sweeps;
    double max_change = 0.0;
    for (Index k = 0; k < p; ++k) {
      if (!active[static_cast<size_t>(k)]) continue;
      const double old = b[k];
      const double u = Xw.col(k).dot(r) / dn + diag[k] * old;
      const double next = soft_threshold(u, config.lambda) / diag[k];
      if (next != old) {
        r -= Xw.col(k) * (next - old);
        b[k] = next;
      }
      max_change = std::max(max_change, std::abs(next - old));
    }
    const double obj = objective();
    if (!std::isfinite(obj)) {
      std::ostringstream msg;
      msg << "lasso_cd: non-finite objective at sweep " << sweeps;
      throw NumericalError(msg.str());
    }
    if (sweep_objectives) {
      sweep_objectives->push_back(obj);
    }
    if (max_change < config.tol) {
      converged = true;
      break;
    }
  }

  CoefficientEstimate est;
  est.beta_hat = config.standardize ? Vector(b.cwiseQuotient(scale)) : b;
  est.gamma_hat = Vector(0);
  est.lambda = config.lambda;
  est.n_iterations = sweeps;
  est.converged = converged;
  est.final_objective = r.squaredNorm() / (2.0 * dn) + config.lambda * b.cwiseAbs().sum();
  return est;
}

double kkt_violation(const Vector& y, const Matrix& X, const Vector& offset, const Vector& beta,
                     double lambda) {
  const Index n = y.size();
  if (X.rows() != n || beta.size() != X.cols()) {
    throw InvalidInputError("kkt_violation: dimension mismatch");
  }
  if (offset.size() != 0 && offset.size() != n) {
    throw InvalidInputError("kkt_violation: offset must be empty or length n");
  }
  Vector r = y - X * beta;
  if (offset.size() != 0) r -= offset;
  const Vector g = X.transpose() * r / static_cast<double>(n);
  double worst = 0.0;
  for (Index k = 0; k < beta.size(); ++k) {
    if (beta[k] != 0.0) {
      const double sign = beta[k] > 0.0 ? 1.0 : -1.0;
      worst = std::max(worst, std::abs(g[k] - lambda * sign));
    } else {
      worst = std::max(worst, std::max(std::abs(g[k]) - lambda, 0.0));
    }
  }
  return worst;
}

}  // namespace nsi
