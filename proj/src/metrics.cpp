#include "nsi/metrics.hpp"

#include <cmath>

namespace nsi {

namespace {

void check_dims(const CoefficientEstimate& est, const TrueModel& truth) {
  if (est.beta_hat.size() != truth.beta.size() || est.gamma_hat.size() != truth.gamma.size()) {
    throw InvalidInputError("metrics: estimate and truth dimensions do not match");
  }
}

}  // namespace

double l1_error(const CoefficientEstimate& est, const TrueModel& truth) {
  check_dims(est, truth);
  return (est.beta_hat - truth.beta).cwiseAbs().sum() +
         (est.gamma_hat - truth.gamma).cwiseAbs().sum();
}

double l2_error(const CoefficientEstimate& est, const TrueModel& truth) {
  check_dims(est, truth);
  return std::sqrt((est.beta_hat - truth.beta).squaredNorm() +
                   (est.gamma_hat - truth.gamma).squaredNorm());
}

double fpr(const CoefficientEstimate& est, const TrueModel& truth, double zero_tol) {
  check_dims(est, truth);
  long nulls = 0;
  long false_positives = 0;
  auto scan = [&](const Vector& t, const Vector& e) {
    for (Index i = 0; i < t.size(); ++i) {
      if (t[i] == 0.0) {
        ++nulls;
        if (std::abs(e[i]) > zero_tol) ++false_positives;
      }
    }
  };
  scan(truth.beta, est.beta_hat);
  scan(truth.gamma, est.gamma_hat);
  if (nulls == 0) {
    throw UndefinedMetricError("fpr: truth has no zero coefficient");
  }
  return static_cast<double>(false_positives) / static_cast<double>(nulls);
}

double tpr(const CoefficientEstimate& est, const TrueModel& truth, double zero_tol) {
  check_dims(est, truth);
  long nonnulls = 0;
  long true_positives = 0;
  auto scan = [&](const Vector& t, const Vector& e) {
    for (Index i = 0; i < t.size(); ++i) {
      if (t[i] != 0.0) {
        ++nonnulls;
        if (std::abs(e[i]) > zero_tol) ++true_positives;
      }
    }
  };
  scan(truth.beta, est.beta_hat);
  scan(truth.gamma, est.gamma_hat);
  if (nonnulls == 0) {
    throw UndefinedMetricError("tpr: truth has no nonzero coefficient");
  }
  return static_cast<double>(true_positives) / static_cast<double>(nonnulls);
}

long nz(const CoefficientEstimate& est, double zero_tol) {
  long count = 0;
  for (Index i = 0; i < est.beta_hat.size(); ++i) {
    if (std::abs(est.beta_hat[i]) > zero_tol) ++count;
  }
  for (Index j = 0; j < est.gamma_hat.size(); ++j) {
    if (std::abs(est.gamma_hat[j]) > zero_tol) ++count;
  }
  return count;
}

double mse(const Vector& predicted, const Vector& actual) {
  if (predicted.size() != actual.size()) {
    throw InvalidInputError("mse: length mismatch");
  }
  if (predicted.size() == 0) {
    throw InvalidInputError("mse: empty vectors");
  }
  return (predicted - actual).squaredNorm() / static_cast<double>(predicted.size());
}

MetricsReport evaluate(const CoefficientEstimate& est, const TrueModel& truth, double zero_tol) {
  MetricsReport report;
  report.l1 = l1_error(est, truth);
  report.l2 = l2_error(est, truth);
  report.nz = nz(est, zero_tol);
  try {
    report.fpr = fpr(est, truth, zero_tol);
  } catch (const UndefinedMetricError&) {
  }
  try {
    report.tpr = tpr(est, truth, zero_tol);
  } catch (const UndefinedMetricError&) {
  }
  return report;
}

}  // namespace nsi
