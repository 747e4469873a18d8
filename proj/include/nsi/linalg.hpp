#pragma once

#include "nsi/rng.hpp"
#include "nsi/types.hpp"

namespace nsi {

/// Dense symmetric matrix; symmetry is guaranteed by construction (inputs are
/// checked and then averaged with their transpose). dim 0 is permitted for
/// the degenerate no-dense-block case.
class SymmetricMatrix {
 public:
  /// Validates squareness, finiteness and symmetry (within tol relative to
  /// the largest entry), then stores the exactly symmetrized matrix.
  static SymmetricMatrix from(const Matrix& m, double tol = 1e-8);
  /// Averages m with its transpose without a symmetry check.
  static SymmetricMatrix symmetrized(const Matrix& m);
  static SymmetricMatrix identity(Index dim);

  Index dim() const { return m_.rows(); }
  const Matrix& mat() const { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }

 private:
  explicit SymmetricMatrix(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

/// Lower-triangular Cholesky factor with strictly positive diagonal.
struct CholeskyFactor {
  Matrix L;
  Index dim() const { return L.rows(); }
};

/// L such that L L^T = S. Throws NotPositiveDefiniteError when S is not PD.
CholeskyFactor cholesky(const SymmetricMatrix& S);

/// Inverse of a symmetric positive definite matrix, symmetric by
/// construction. Throws NotPositiveDefiniteError when S is not PD.
SymmetricMatrix spd_inverse(const SymmetricMatrix& S);

/// W^T W / n. The model is mean-zero, so columns are not centered unless
/// `center` is set (real-data pipelines).
SymmetricMatrix sample_covariance(const Matrix& W, bool center = false);

/// n rows drawn iid from N(0, L L^T), realized as G L^T with G standard
/// normal filled row by row. Deterministic given the stream state.
Matrix gaussian_sample(const CholeskyFactor& chol, Index n, RngStream& rng);

}  // namespace nsi
