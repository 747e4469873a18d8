#pragma once

#include "nsi/nsi.hpp"
#include "nsi/precision.hpp"
#include "nsi/simulate.hpp"
#include "nsi/tuning.hpp"
#include "nsi/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nsi {

enum class Method { nsi, lasso, plugin };

const char* to_string(Method method);
Method method_from_string(const std::string& name);

/// How the harness obtains the precision estimate of the W block.
enum class PrecisionSource { known, identity, ridge, glasso };

const char* to_string(PrecisionSource source);
PrecisionSource precision_source_from_string(const std::string& name);

/// One swept parameter: "ratio" re-splits p+q by the dense fraction, "rho"
/// sets the tridiagonal off-diagonal. Empty parameter means a single setting
/// taken from the design as-is.
struct SweepSpec {
  std::string parameter;
  std::vector<double> values;
};

struct ExperimentSpec {
  SimulationConfig design;
  SweepSpec sweep;
  std::vector<Method> methods{Method::nsi, Method::lasso};
  int replications = 100;
  std::uint64_t base_seed = 0;
  int cv_folds = 10;
  int grid_size = 50;
  double grid_min_ratio = 1e-3;
  PrecisionSource precision = PrecisionSource::known;
  GlassoRuleParams glasso_rule;
  NsiConfig fit;  // lambda is set per fit from CV
  int threads = 0;  // 0: hardware concurrency

  void validate() const;
};

struct ReplicationRecord {
  std::string setting;
  Method method = Method::nsi;
  int replication = 0;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  int n_iterations = 0;
  bool converged = false;
  double l1 = 0.0;
  double l2 = 0.0;
  std::optional<double> fpr;
  std::optional<double> tpr;
  long nz = 0;
};

struct MetricStat {
  double mean = 0.0;
  double sd = 0.0;
  long count = 0;
};

/// Mean and sample standard deviation (ddof 1; sd = 0 for a single value),
/// accumulated in input order.
MetricStat stat_of(const std::vector<double>& values);

struct AggregateRow {
  std::string setting;
  Method method = Method::nsi;
  long replications = 0;
  MetricStat l2;
  MetricStat l1;
  MetricStat fpr;
  MetricStat tpr;
  MetricStat nz;
};

struct ExperimentResult {
  std::vector<ReplicationRecord> records;
  std::vector<AggregateRow> rows;
  std::vector<std::string> failures;
};

/// Recompute aggregate rows from records (grouped by setting then method, in
/// first-appearance order); used both by run_replications and to verify
/// persisted records.
std::vector<AggregateRow> aggregate_records(const std::vector<ReplicationRecord>& records);

/// Run the full sweep: per (setting, replication), generate one instance,
/// share it across methods, select lambda by k-fold CV and refit on the full
/// instance. Replications run in parallel over `threads` workers; records are
/// written into preassigned slots so results are identical at any thread
/// count. Failed replications are excluded with a warning; more than 5%
/// failures raises PipelineError.
ExperimentResult run_replications(const ExperimentSpec& spec);

/// Pearson correlation of each column with y; NaN for constant columns (or
/// all-NaN when y is constant).
Vector column_correlations(const Matrix& X, const Vector& y);

/// Indices (ascending) of columns whose |correlation| is >= threshold;
/// constant columns are dropped.
std::vector<Index> correlation_screen(const Matrix& X, const Vector& y, double threshold);

struct HoldoutRow {
  Method method = Method::nsi;
  double mse = 0.0;
  double lambda = 0.0;
  Index p = 0;
  Index q = 0;
  Index n_train = 0;
  Index n_test = 0;
};

struct HoldoutOptions {
  int cv_folds = 10;
  int grid_size = 50;
  double grid_min_ratio = 1e-3;
  /// Columns with |correlation| >= threshold + dense_margin go to the dense
  /// block W, the remaining screened columns to Z.
  double dense_margin = 0.05;
  /// Center columns and response by their training means before fitting (the
  /// model has no intercept).
  bool center = true;
  PrecisionSource precision = PrecisionSource::glasso;
  GlassoRuleParams glasso_rule;
  NsiConfig fit;
};

/// Screening + holdout pipeline for external data: shuffle rows by seed, fit
/// on round(split_fraction * n) rows, evaluate MSE on the rest. Throws
/// PipelineError when fewer than 2 columns survive screening.
std::vector<HoldoutRow> holdout_eval(const Matrix& X, const Vector& y, double split_fraction,
                                     double threshold, const std::vector<Method>& methods,
                                     std::uint64_t seed, const HoldoutOptions& options = {});

}  // namespace nsi
