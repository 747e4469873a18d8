#include "nsi/precision.hpp"

#include "nsi/sparse_solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace nsi {

const char* to_string(PrecisionMethod method) {
  switch (method) {
    case PrecisionMethod::known:
      return "known";
    case PrecisionMethod::identity:
      return "identity";
    case PrecisionMethod::ridge_inverse:
      return "ridge_inverse";
    case PrecisionMethod::graphical_lasso:
      return "graphical_lasso";
  }
  return "unknown";
}

PrecisionEstimate PrecisionEstimate::make(SymmetricMatrix omega, PrecisionMethod method,
                                          std::optional<double> lambda_star, bool converged) {
  cholesky(omega);  // PD certificate
  return PrecisionEstimate{std::move(omega), method, lambda_star, converged};
}

PrecisionEstimate identity_precision(Index q) {
  if (q < 1) {
    throw InvalidInputError("identity_precision: q must be >= 1");
  }
  return PrecisionEstimate::make(SymmetricMatrix::identity(q), PrecisionMethod::identity);
}

PrecisionEstimate ridge_inverse_precision(const SymmetricMatrix& S, double eps) {
  if (!(eps > 0.0)) {
    throw InvalidInputError("ridge_inverse_precision: eps must be > 0");
  }
  Matrix ridged = S.mat();
  ridged.diagonal().array() += eps;
  SymmetricMatrix inv = spd_inverse(SymmetricMatrix::symmetrized(ridged));
  return PrecisionEstimate::make(std::move(inv), PrecisionMethod::ridge_inverse);
}

PrecisionEstimate known_precision(const SymmetricMatrix& omega) {
  return PrecisionEstimate::make(omega, PrecisionMethod::known);
}

void GlassoRuleParams::validate() const {
  if (!(M > 0.0)) throw InvalidInputError("GlassoRuleParams: M must be > 0");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw InvalidInputError("GlassoRuleParams: alpha must be in (0, 1]");
  }
  if (!(tau > 1.0)) throw InvalidInputError("GlassoRuleParams: tau must be > 1");
}

double glasso_lambda_rule(Index n, Index dim, const GlassoRuleParams& params,
                          LambdaRuleParse parse) {
  params.validate();
  if (n < 2 || dim < 1) {
    throw InvalidInputError("glasso_lambda_rule: need n >= 2 and dim >= 1");
  }
  const double nd = static_cast<double>(n) * static_cast<double>(dim);
  const double log_nd = std::log(nd);
  const double inner = parse == LambdaRuleParse::power_of_log
                           ? std::pow(log_nd, params.tau) / static_cast<double>(n)
                           : params.tau * log_nd / static_cast<double>(n);
  return 4.0 * (params.M / params.alpha) * std::sqrt(inner);
}

double glasso_kkt_residual(const SymmetricMatrix& S, const SymmetricMatrix& omega,
                           double lambda) {
  if (S.dim() != omega.dim()) {
    throw InvalidInputError("glasso_kkt_residual: dimension mismatch");
  }
  const SymmetricMatrix sigma = spd_inverse(omega);
  const Index q = S.dim();
  const double omega_scale = std::max(1.0, omega.mat().cwiseAbs().maxCoeff());
  const double zero_thresh = 1e-12 * omega_scale;
  double worst = 0.0;
  for (Index j = 0; j < q; ++j) {
    worst = std::max(worst, std::abs(sigma(j, j) - S(j, j)));
    for (Index k = j + 1; k < q; ++k) {
      const double d = sigma(j, k) - S(j, k);
      if (std::abs(omega(j, k)) <= zero_thresh) {
        worst = std::max(worst, std::max(std::abs(d) - lambda, 0.0));
      } else {
        const double sign = omega(j, k) > 0.0 ? 1.0 : -1.0;
        worst = std::max(worst, std::abs(d - lambda * sign));
      }
    }
  }
  return worst;
}

namespace {

// Recover Omega from the block-descent state: for each column j,
//   theta_jj = 1 / (W_jj - w12^T beta_j),  theta_{.j} = -theta_jj beta_j.
// Soft-thresholded betas give exact zeros in the off-diagonal support.
Matrix recover_omega(const Matrix& W, const Matrix& B) {
  const Index q = W.rows();
  Matrix theta = Matrix::Zero(q, q);
  for (Index j = 0; j < q; ++j) {
    double cross = 0.0;
    for (Index k = 0; k < q; ++k) {
      if (k != j) cross += W(k, j) * B(k, j);
    }
    const double denom = W(j, j) - cross;
    if (!(denom > 0.0) || !std::isfinite(denom)) {
      throw NumericalError("graphical_lasso: non-positive partial variance");
    }
    theta(j, j) = 1.0 / denom;
    for (Index k = 0; k < q; ++k) {
      if (k != j && B(k, j) != 0.0) {
        theta(k, j) = -B(k, j) * theta(j, j);
      }
    }
  }
  // symmetrize: averaging keeps entries zero exactly when both sides are zero
  return 0.5 * (theta + theta.transpose());
}

}  // namespace

PrecisionEstimate graphical_lasso(const SymmetricMatrix& S, double lambda, int max_iter,
                                  double tol) {
  const Index q = S.dim();
  if (q < 1) {
    throw InvalidInputError("graphical_lasso: empty matrix");
  }
  for (Index j = 0; j < q; ++j) {
    if (!(S(j, j) > 0.0)) {
      throw InvalidInputError("graphical_lasso: diagonal must be strictly positive");
    }
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidInputError("graphical_lasso: lambda must be finite and >= 0");
  }
  if (max_iter < 1 || !(tol > 0.0)) {
    throw InvalidInputError("graphical_lasso: need max_iter >= 1 and tol > 0");
  }

  if (q == 1) {
    Matrix one(1, 1);
    one(0, 0) = 1.0 / S(0, 0);
    return PrecisionEstimate::make(SymmetricMatrix::symmetrized(one),
                                   PrecisionMethod::graphical_lasso, lambda);
  }

  Matrix W = S.mat();       // current covariance iterate; diagonal stays S_jj
  Matrix B = Matrix::Zero(q, q);  // column j: lasso coefficients of subproblem j
  const int max_inner = 200;
  const double inner_tol = 0.1 * tol / std::max(1.0, W.diagonal().maxCoeff());

  SymmetricMatrix best = SymmetricMatrix::identity(q);
  double best_residual = std::numeric_limits<double>::infinity();
  bool have_candidate = false;
  bool converged = false;

  for (int iter = 0; iter < max_iter && !converged; ++iter) {
    for (Index j = 0; j < q; ++j) {
      Vector beta = B.col(j);
      beta[j] = 0.0;
      Vector v = W * beta;  // running W11 * beta, entry j unused
      for (int inner = 0; inner < max_inner; ++inner) {
        double max_step = 0.0;
        for (Index k = 0; k < q; ++k) {
          if (k == j) continue;
          const double old = beta[k];
          const double grad = S(k, j) - (v[k] - W(k, k) * old);
          const double next = soft_threshold(grad, lambda) / W(k, k);
          if (next != old) {
            v += W.col(k) * (next - old);
            beta[k] = next;
          }
          max_step = std::max(max_step, std::abs(next - old) * W(k, k));
        }
        if (max_step < inner_tol) break;
      }
      B.col(j) = beta;
      B(j, j) = 0.0;
      for (Index k = 0; k < q; ++k) {
        if (k != j) {
          W(k, j) = v[k];
          W(j, k) = v[k];
        }
      }
    }

    // Mid-path iterates can fail the PD certificate; keep sweeping.
    try {
      SymmetricMatrix candidate = SymmetricMatrix::symmetrized(recover_omega(W, B));
      const double residual = glasso_kkt_residual(S, candidate, lambda);
      if (residual < best_residual) {
        best_residual = residual;
        best = candidate;
        have_candidate = true;
      }
      if (residual <= tol) {
        converged = true;
      }
    } catch (const Error&) {
      if (iter + 1 >= max_iter) throw;
    }
  }

  if (!have_candidate) {
    throw NumericalError("graphical_lasso: no usable iterate");
  }
  return PrecisionEstimate::make(std::move(best), PrecisionMethod::graphical_lasso, lambda,
                                 converged);
}

}  // namespace nsi
