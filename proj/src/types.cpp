#include "nsi/types.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <sstream>

namespace nsi {

void Dataset::validate() const {
  if (n() < 1) {
    throw InvalidInputError("Dataset: response must have at least one row");
  }
  if (Z.rows() != n() || W.rows() != n()) {
    std::ostringstream msg;
    msg << "Dataset: row mismatch (y " << n() << ", Z " << Z.rows() << ", W " << W.rows() << ")";
    throw InvalidInputError(msg.str());
  }
  if (p() + q() < 1) {
    throw InvalidInputError("Dataset: need at least one predictor column");
  }
  if (!y.allFinite() || !Z.allFinite() || !W.allFinite()) {
    throw InvalidInputError("Dataset: non-finite entries");
  }
}

Index TrueModel::support_size(double zero_tol) const {
  Index count = 0;
  for (Index i = 0; i < beta.size(); ++i) {
    if (std::abs(beta[i]) > zero_tol) ++count;
  }
  for (Index j = 0; j < gamma.size(); ++j) {
    if (std::abs(gamma[j]) > zero_tol) ++count;
  }
  return count;
}

void TrueModel::validate(const Dataset& data) const {
  if (beta.size() != data.p() || gamma.size() != data.q()) {
    throw InvalidInputError("TrueModel: coefficient lengths do not match the dataset");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw InvalidInputError("TrueModel: sigma must be finite and >= 0");
  }
  if (!beta.allFinite() || !gamma.allFinite()) {
    throw InvalidInputError("TrueModel: non-finite coefficients");
  }
  if (omega.has_value()) {
    if (omega->rows() != data.q() || omega->cols() != data.q()) {
      throw InvalidInputError("TrueModel: omega dimension must equal q");
    }
    if (!omega->allFinite()) {
      throw InvalidInputError("TrueModel: non-finite omega");
    }
    const double scale = std::max(1.0, omega->size() > 0 ? omega->cwiseAbs().maxCoeff() : 0.0);
    if (omega->size() > 0 &&
        (*omega - omega->transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
      throw InvalidInputError("TrueModel: omega must be symmetric");
    }
    Eigen::LLT<Matrix> llt(*omega);
    if (llt.info() != Eigen::Success) {
      throw InvalidInputError("TrueModel: omega must be positive definite");
    }
  }
}

}  // namespace nsi
