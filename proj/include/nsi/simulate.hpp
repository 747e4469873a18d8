#pragma once

#include "nsi/linalg.hpp"
#include "nsi/types.hpp"

#include <cstdint>
#include <utility>

namespace nsi {

/// Parameters of the benchmark designs: joint precision over all p+q columns
/// is tridiagonal with unit diagonal and off-diagonal rho (identity when
/// rho = 0), beta has beta_support leading entries at beta_value, gamma is
/// constant at gamma_value, noise is N(0, sigma^2).
struct SimulationConfig {
  Index n = 100;
  Index p = 50;
  Index q = 50;
  double rho = 0.0;
  double beta_value = 4.0;
  Index beta_support = 10;
  double gamma_value = 6.0;
  double sigma = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SimulationInstance {
  Dataset data;
  TrueModel truth;
  Vector epsilon;
  SimulationConfig config;
};

/// Unit diagonal, rho on the first off-diagonal; throws
/// NotPositiveDefiniteError when |rho| is too large for the dimension.
SymmetricMatrix make_tridiagonal_precision(Index dim, double rho);

/// Draws (Z, W) jointly from N(0, Omega^{-1}) and assembles
/// y = Z beta + W gamma + epsilon. Fully determined by config.seed. The
/// stored truth carries the precision of W's marginal law, i.e. the inverse
/// of the W sub-block of Sigma.
SimulationInstance gen_instance(const SimulationConfig& config);

/// Split a total column count into (p, q) with q = round(ratio * total),
/// rounding half up. Throws when either block would be empty.
std::pair<Index, Index> sparsity_split(Index p_plus_q, double ratio);

}  // namespace nsi
