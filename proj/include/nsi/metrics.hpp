#pragma once

#include "nsi/types.hpp"

namespace nsi {

/// Sum of absolute coordinate errors over both blocks.
double l1_error(const CoefficientEstimate& est, const TrueModel& truth);

/// Euclidean norm of the concatenated coordinate error vector.
double l2_error(const CoefficientEstimate& est, const TrueModel& truth);

/// Fraction of truth-zero coordinates estimated above zero_tol in magnitude.
/// Throws UndefinedMetricError when the truth has no zero coordinate.
double fpr(const CoefficientEstimate& est, const TrueModel& truth, double zero_tol = 0.0);

/// Fraction of truth-nonzero coordinates estimated above zero_tol.
/// Throws UndefinedMetricError when the truth has no nonzero coordinate.
double tpr(const CoefficientEstimate& est, const TrueModel& truth, double zero_tol = 0.0);

/// Count of estimated coordinates with magnitude above zero_tol, both blocks.
long nz(const CoefficientEstimate& est, double zero_tol = 0.0);

/// Mean squared difference; lengths must match and be >= 1.
double mse(const Vector& predicted, const Vector& actual);

/// All selection/error metrics in one report; fpr/tpr are left unset where
/// undefined instead of throwing.
MetricsReport evaluate(const CoefficientEstimate& est, const TrueModel& truth,
                       double zero_tol = 0.0);

}  // namespace nsi
