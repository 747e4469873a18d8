#include "nsi/simulate.hpp"

#include "nsi/rng.hpp"

#include <cmath>
#include <sstream>

namespace nsi {

void SimulationConfig::validate() const {
  if (n < 1) throw InvalidInputError("SimulationConfig: n must be >= 1");
  if (p < 0 || q < 0 || p + q < 1) {
    throw InvalidInputError("SimulationConfig: need p, q >= 0 and p + q >= 1");
  }
  if (beta_support < 0 || beta_support > p) {
    throw InvalidInputError("SimulationConfig: beta_support must lie in [0, p]");
  }
  if (!(std::abs(rho) < 1.0)) {
    throw InvalidInputError("SimulationConfig: rho must lie in (-1, 1)");
  }
  // sigma = 0 is allowed: noiseless instances are used as fixtures
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw InvalidInputError("SimulationConfig: sigma must be finite and >= 0");
  }
  if (!std::isfinite(beta_value) || !std::isfinite(gamma_value)) {
    throw InvalidInputError("SimulationConfig: non-finite coefficient values");
  }
}

SymmetricMatrix make_tridiagonal_precision(Index dim, double rho) {
  if (dim < 1) throw InvalidInputError("make_tridiagonal_precision: dim must be >= 1");
  Matrix omega = Matrix::Identity(dim, dim);
  for (Index j = 1; j < dim; ++j) {
    omega(j, j - 1) = rho;
    omega(j - 1, j) = rho;
  }
  SymmetricMatrix result = SymmetricMatrix::symmetrized(omega);
  cholesky(result);  // PD check; throws when |rho| is too large
  return result;
}

SimulationInstance gen_instance(const SimulationConfig& config) {
  config.validate();
  const Index d = config.p + config.q;

  const SymmetricMatrix omega_full = make_tridiagonal_precision(d, config.rho);
  const SymmetricMatrix sigma_full =
      config.rho == 0.0 ? SymmetricMatrix::identity(d) : spd_inverse(omega_full);
  const CholeskyFactor chol = cholesky(sigma_full);

  RngStream root(config.seed);
  RngStream design_stream = root.substream(0);
  RngStream noise_stream = root.substream(1);

  const Matrix X = gaussian_sample(chol, config.n, design_stream);

  SimulationInstance inst;
  inst.config = config;
  inst.data.Z = X.leftCols(config.p);
  inst.data.W = X.rightCols(config.q);

  inst.truth.beta = Vector::Zero(config.p);
  for (Index k = 0; k < config.beta_support; ++k) {
    inst.truth.beta[k] = config.beta_value;
  }
  inst.truth.gamma = Vector::Constant(config.q, config.gamma_value);
  inst.truth.sigma = config.sigma;

  inst.epsilon = Vector(config.n);
  for (Index i = 0; i < config.n; ++i) {
    inst.epsilon[i] = config.sigma * noise_stream.next_normal();
  }

  inst.data.y = inst.data.Z * inst.truth.beta + inst.data.W * inst.truth.gamma + inst.epsilon;

  if (config.q > 0) {
    // Precision of W's marginal law: invert the W sub-block of Sigma.
    const Matrix sigma_w = sigma_full.mat().block(config.p, config.p, config.q, config.q);
    inst.truth.omega = spd_inverse(SymmetricMatrix::symmetrized(sigma_w)).mat();
  }

  inst.data.validate();
  inst.truth.validate(inst.data);
  return inst;
}

std::pair<Index, Index> sparsity_split(Index p_plus_q, double ratio) {
  if (p_plus_q < 2) {
    throw InvalidInputError("sparsity_split: need at least two columns");
  }
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw InvalidInputError("sparsity_split: ratio must lie in (0, 1)");
  }
  const Index q = static_cast<Index>(std::floor(ratio * static_cast<double>(p_plus_q) + 0.5));
  const Index p = p_plus_q - q;
  if (p < 1 || q < 1) {
    std::ostringstream msg;
    msg << "sparsity_split: ratio " << ratio << " leaves an empty block for total " << p_plus_q;
    throw InvalidInputError(msg.str());
  }
  return {p, q};
}

}  // namespace nsi
