#include "nsi/linalg.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <sstream>

namespace nsi {

SymmetricMatrix SymmetricMatrix::from(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) {
    std::ostringstream msg;
    msg << "SymmetricMatrix: expected square matrix, got " << m.rows() << "x" << m.cols();
    throw InvalidInputError(msg.str());
  }
  if (!m.allFinite()) {
    throw InvalidInputError("SymmetricMatrix: non-finite entries");
  }
  const double scale = std::max(1.0, m.size() > 0 ? m.cwiseAbs().maxCoeff() : 0.0);
  const double asym = m.size() > 0 ? (m - m.transpose()).cwiseAbs().maxCoeff() : 0.0;
  if (asym > tol * scale) {
    std::ostringstream msg;
    msg << "SymmetricMatrix: asymmetry " << asym << " exceeds tolerance " << tol * scale;
    throw InvalidInputError(msg.str());
  }
  return symmetrized(m);
}

SymmetricMatrix SymmetricMatrix::symmetrized(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw InvalidInputError("SymmetricMatrix: expected square matrix");
  }
  Matrix sym = 0.5 * (m + m.transpose());
  return SymmetricMatrix(std::move(sym));
}

SymmetricMatrix SymmetricMatrix::identity(Index dim) {
  if (dim < 0) {
    throw InvalidInputError("SymmetricMatrix: negative dimension");
  }
  return SymmetricMatrix(Matrix::Identity(dim, dim));
}

CholeskyFactor cholesky(const SymmetricMatrix& S) {
  Eigen::LLT<Matrix> llt(S.mat());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefiniteError("cholesky: matrix is not positive definite");
  }
  Matrix L = llt.matrixL();
  // LLT can succeed on the edge of semidefiniteness; insist on strict pivots.
  for (Index i = 0; i < L.rows(); ++i) {
    if (!(L(i, i) > 0.0) || !std::isfinite(L(i, i))) {
      throw NotPositiveDefiniteError("cholesky: non-positive pivot");
    }
  }
  return CholeskyFactor{std::move(L)};
}

SymmetricMatrix spd_inverse(const SymmetricMatrix& S) {
  Eigen::LLT<Matrix> llt(S.mat());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefiniteError("spd_inverse: matrix is not positive definite");
  }
  Matrix inv = llt.solve(Matrix::Identity(S.dim(), S.dim()));
  return SymmetricMatrix::symmetrized(inv);
}

SymmetricMatrix sample_covariance(const Matrix& W, bool center) {
  const Index n = W.rows();
  if (n < 1) {
    throw InvalidInputError("sample_covariance: need at least one row");
  }
  if (!W.allFinite()) {
    throw InvalidInputError("sample_covariance: non-finite entries");
  }
  if (!center) {
    return SymmetricMatrix::symmetrized(W.transpose() * W / static_cast<double>(n));
  }
  Matrix centered = W.rowwise() - W.colwise().mean();
  return SymmetricMatrix::symmetrized(centered.transpose() * centered / static_cast<double>(n));
}

Matrix gaussian_sample(const CholeskyFactor& chol, Index n, RngStream& rng) {
  if (n < 1) {
    throw InvalidInputError("gaussian_sample: n must be >= 1");
  }
  const Index d = chol.dim();
  Matrix g(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) {
      g(i, j) = rng.next_normal();
    }
  }
  return g * chol.L.transpose();
}

}  // namespace nsi
