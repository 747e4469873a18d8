#include "nsi/nsi.hpp"

#include <cmath>
#include <sstream>

namespace nsi {

namespace {

void check_fit_inputs(const Dataset& data, const PrecisionEstimate& omega,
                      const NsiConfig& config) {
  data.validate();
  if (omega.dim() != data.q()) {
    std::ostringstream msg;
    msg << "nsi: precision dimension " << omega.dim() << " does not match q = " << data.q();
    throw InvalidInputError(msg.str());
  }
  if (!(config.lambda >= 0.0) || !std::isfinite(config.lambda)) {
    throw InvalidInputError("nsi: lambda must be finite and >= 0");
  }
  if (config.max_outer_iter < 1) {
    throw InvalidInputError("nsi: max_outer_iter must be >= 1");
  }
  if (!(config.tol > 0.0)) {
    throw InvalidInputError("nsi: tol must be > 0");
  }
  if (!(config.zero_tol >= 0.0)) {
    throw InvalidInputError("nsi: zero_tol must be >= 0");
  }
}

// Column scales: sqrt of the in-sample second moment when standardizing,
// 1 otherwise. Zero-norm columns get scale 0 and are frozen by callers.
Vector column_scales(const Matrix& X, bool standardize) {
  const double dn = static_cast<double>(X.rows());
  Vector s = Vector::Ones(X.cols());
  for (Index k = 0; k < X.cols(); ++k) {
    const double ss = X.col(k).squaredNorm() / dn;
    if (ss <= 0.0) {
      s[k] = 0.0;
    } else if (standardize) {
      s[k] = std::sqrt(ss);
    }
  }
  return s;
}

}  // namespace

CoefficientEstimate nsi_init(const Dataset& data, const PrecisionEstimate& omega,
                             const NsiConfig& config) {
  check_fit_inputs(data, omega, config);
  const double dn = static_cast<double>(data.n());
  Vector gamma0 = data.q() > 0 ? Vector(omega.omega_hat.mat() * (data.W.transpose() * data.y) / dn)
                               : Vector(0);
  Vector offset = data.q() > 0 ? Vector(data.W * gamma0) : Vector(0);

  CoefficientEstimate est;
  if (data.p() > 0) {
    est = lasso_cd(data.y, data.Z, offset, config.init_lasso());
  } else {
    est.beta_hat = Vector(0);
    est.lambda = config.lambda;
    est.n_iterations = 0;
    est.converged = true;
    Vector r = data.y - offset;
    est.final_objective = r.squaredNorm() / (2.0 * dn);
  }
  est.gamma_hat = std::move(gamma0);
  return est;
}

FitResult nsi_fit(const Dataset& data, const PrecisionEstimate& omega, const NsiConfig& config) {
  check_fit_inputs(data, omega, config);
  const Index n = data.n();
  const Index p = data.p();
  const Index q = data.q();
  const double dn = static_cast<double>(n);

  if (q == 0) {
    // The algorithm reduces to the sparse solver; delegate so the two paths
    // agree exactly.
    std::vector<double> trace;
    CoefficientEstimate est = lasso_cd(data.y, data.Z, Vector(0), config.init_lasso(), &trace);
    FitResult result;
    result.objective_trace = std::move(trace);
    result.gamma_stationarity = 0.0;
    const Vector sz = column_scales(data.Z, config.standardize);
    Matrix zs = data.Z;
    Vector bt = est.beta_hat;
    for (Index k = 0; k < p; ++k) {
      if (sz[k] > 0.0 && config.standardize) {
        zs.col(k) /= sz[k];
        bt[k] *= sz[k];
      }
    }
    result.beta_kkt = kkt_violation(data.y, zs, Vector(0), bt, config.lambda);
    result.estimate = std::move(est);
    return result;
  }

  CoefficientEstimate init = nsi_init(data, omega, config);

  const Vector sz = column_scales(data.Z, config.standardize);
  const Vector sw = column_scales(data.W, config.standardize);
  Matrix Zs = data.Z;
  Matrix Ws = data.W;
  Vector bt = init.beta_hat;
  Vector gt = init.gamma_hat;
  for (Index k = 0; k < p; ++k) {
    if (sz[k] > 0.0) {
      if (config.standardize) Zs.col(k) /= sz[k];
      bt[k] *= sz[k];
    } else {
      bt[k] = 0.0;
    }
  }
  for (Index j = 0; j < q; ++j) {
    if (sw[j] > 0.0) {
      if (config.standardize) Ws.col(j) /= sw[j];
      gt[j] *= sw[j];
    }
    // zero-norm W columns keep their initial value; they do not affect fits
  }
  const Vector dz = config.standardize
                        ? Vector(Vector::Ones(p))
                        : Vector(Zs.colwise().squaredNorm().transpose() / dn);
  const Vector dw = config.standardize
                        ? Vector(Vector::Ones(q))
                        : Vector(Ws.colwise().squaredNorm().transpose() / dn);

  Vector r = data.y;
  if (p > 0) r -= Zs * bt;
  for (Index j = 0; j < q; ++j) {
    if (sw[j] > 0.0 && gt[j] != 0.0) r -= Ws.col(j) * gt[j];
  }

  auto objective = [&]() {
    return r.squaredNorm() / (2.0 * dn) + config.lambda * bt.cwiseAbs().sum();
  };

  FitResult result;
  result.objective_trace.push_back(objective());

  bool converged = false;
  int sweeps = 0;
  for (; sweeps < config.max_outer_iter;) {
    ++sweeps;
    double max_change = 0.0;
    for (Index j = 0; j < q; ++j) {
      if (sw[j] <= 0.0) continue;
      const double old = gt[j];
      const double next = (Ws.col(j).dot(r) / dn + dw[j] * old) / dw[j];
      if (next != old) {
        r -= Ws.col(j) * (next - old);
        gt[j] = next;
      }
      max_change = std::max(max_change, std::abs(next - old));
    }
    for (Index k = 0; k < p; ++k) {
      if (sz[k] <= 0.0) continue;
      const double old = bt[k];
      const double u = Zs.col(k).dot(r) / dn + dz[k] * old;
      const double next = soft_threshold(u, config.lambda) / dz[k];
      if (next != old) {
        r -= Zs.col(k) * (next - old);
        bt[k] = next;
      }
      max_change = std::max(max_change, std::abs(next - old));
    }
    const double obj = objective();
    if (!std::isfinite(obj)) {
      std::ostringstream msg;
      msg << "nsi_fit: non-finite objective at outer iteration " << sweeps;
      throw NumericalError(msg.str());
    }
    result.objective_trace.push_back(obj);
    if (max_change < config.tol) {
      converged = true;
      break;
    }
  }

  result.gamma_stationarity = 0.0;
  for (Index j = 0; j < q; ++j) {
    if (sw[j] <= 0.0) continue;
    result.gamma_stationarity =
        std::max(result.gamma_stationarity, std::abs(Ws.col(j).dot(r) / dn));
  }
  result.beta_kkt = 0.0;
  for (Index k = 0; k < p; ++k) {
    if (sz[k] <= 0.0) continue;
    const double g = Zs.col(k).dot(r) / dn;
    if (bt[k] != 0.0) {
      const double sign = bt[k] > 0.0 ? 1.0 : -1.0;
      result.beta_kkt = std::max(result.beta_kkt, std::abs(g - config.lambda * sign));
    } else {
      result.beta_kkt = std::max(result.beta_kkt, std::max(std::abs(g) - config.lambda, 0.0));
    }
  }

  CoefficientEstimate est;
  est.beta_hat = Vector(p);
  for (Index k = 0; k < p; ++k) {
    est.beta_hat[k] = sz[k] > 0.0 ? bt[k] / sz[k] : 0.0;
  }
  est.gamma_hat = Vector(q);
  for (Index j = 0; j < q; ++j) {
    est.gamma_hat[j] = sw[j] > 0.0 ? gt[j] / sw[j] : gt[j];
  }
  est.lambda = config.lambda;
  est.n_iterations = sweeps;
  est.converged = converged;
  est.final_objective = result.objective_trace.back();
  result.estimate = std::move(est);
  return result;
}

CoefficientEstimate oracle_fit(const Dataset& data, const Vector& true_gamma,
                               const PrecisionEstimate& omega, double lambda) {
  NsiConfig config;
  config.lambda = lambda;
  check_fit_inputs(data, omega, config);
  if (true_gamma.size() != data.q()) {
    throw InvalidInputError("oracle_fit: true_gamma length must equal q");
  }
  const double dn = static_cast<double>(data.n());
  Vector offset = data.q() > 0 ? Vector(data.W * true_gamma) : Vector(0);

  CoefficientEstimate est;
  if (data.p() > 0) {
    est = lasso_cd(data.y, data.Z, offset, config.init_lasso());
  } else {
    est.beta_hat = Vector(0);
    est.lambda = lambda;
    est.converged = true;
  }
  Vector residual = data.y;
  if (data.p() > 0) residual -= data.Z * est.beta_hat;
  est.gamma_hat = data.q() > 0
                      ? Vector(omega.omega_hat.mat() * (data.W.transpose() * residual) / dn)
                      : Vector(0);
  Vector full_residual = residual;
  if (data.q() > 0) full_residual -= data.W * est.gamma_hat;
  est.final_objective = full_residual.squaredNorm() / (2.0 * dn) +
                        lambda * est.beta_hat.cwiseAbs().sum();
  return est;
}

CoefficientEstimate plugin_fit(const Dataset& data, const PrecisionEstimate& omega,
                               double lambda) {
  NsiConfig config;
  config.lambda = lambda;
  return nsi_init(data, omega, config);
}

}  // namespace nsi
