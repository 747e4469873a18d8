#include "nsi/harness.hpp"

#include "nsi/log.hpp"
#include "nsi/metrics.hpp"
#include "nsi/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace nsi {

const char* to_string(Method method) {
  switch (method) {
    case Method::nsi:
      return "nsi";
    case Method::lasso:
      return "lasso";
    case Method::plugin:
      return "plugin";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  if (name == "nsi") return Method::nsi;
  if (name == "lasso") return Method::lasso;
  if (name == "plugin") return Method::plugin;
  throw InvalidInputError("unknown method '" + name + "' (expected nsi|lasso|plugin)");
}

const char* to_string(PrecisionSource source) {
  switch (source) {
    case PrecisionSource::known:
      return "known";
    case PrecisionSource::identity:
      return "identity";
    case PrecisionSource::ridge:
      return "ridge";
    case PrecisionSource::glasso:
      return "glasso";
  }
  return "unknown";
}

PrecisionSource precision_source_from_string(const std::string& name) {
  if (name == "known") return PrecisionSource::known;
  if (name == "identity") return PrecisionSource::identity;
  if (name == "ridge") return PrecisionSource::ridge;
  if (name == "glasso") return PrecisionSource::glasso;
  throw InvalidInputError("unknown precision source '" + name +
                          "' (expected known|identity|ridge|glasso)");
}

void ExperimentSpec::validate() const {
  design.validate();
  if (replications < 1) throw InvalidInputError("ExperimentSpec: replications must be >= 1");
  if (methods.empty()) throw InvalidInputError("ExperimentSpec: no methods selected");
  if (cv_folds < 2) throw InvalidInputError("ExperimentSpec: cv_folds must be >= 2");
  if (grid_size < 1) throw InvalidInputError("ExperimentSpec: grid_size must be >= 1");
  if (!(grid_min_ratio > 0.0 && grid_min_ratio <= 1.0)) {
    throw InvalidInputError("ExperimentSpec: grid_min_ratio must lie in (0, 1]");
  }
  if (!sweep.parameter.empty() && sweep.parameter != "ratio" && sweep.parameter != "rho") {
    throw InvalidInputError("ExperimentSpec: sweep parameter must be 'ratio' or 'rho'");
  }
  if (!sweep.parameter.empty() && sweep.values.empty()) {
    throw InvalidInputError("ExperimentSpec: sweep has no values");
  }
}

MetricStat stat_of(const std::vector<double>& values) {
  MetricStat stat;
  stat.count = static_cast<long>(values.size());
  if (values.empty()) return stat;
  double sum = 0.0;
  for (double v : values) sum += v;
  stat.mean = sum / static_cast<double>(values.size());
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) {
      const double d = v - stat.mean;
      ss += d * d;
    }
    stat.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return stat;
}

std::vector<AggregateRow> aggregate_records(const std::vector<ReplicationRecord>& records) {
  std::vector<std::pair<std::string, Method>> keys;
  auto key_index = [&](const ReplicationRecord& r) {
    for (size_t i = 0; i < keys.size(); ++i) {
      if (keys[i].first == r.setting && keys[i].second == r.method) return i;
    }
    keys.emplace_back(r.setting, r.method);
    return keys.size() - 1;
  };

  struct Accum {
    std::vector<double> l1, l2, fpr, tpr, nz;
    long count = 0;
  };
  std::vector<Accum> groups;
  for (const auto& r : records) {
    const size_t i = key_index(r);
    if (i >= groups.size()) groups.resize(keys.size());
    Accum& a = groups[i];
    a.l1.push_back(r.l1);
    a.l2.push_back(r.l2);
    if (r.fpr) a.fpr.push_back(*r.fpr);
    if (r.tpr) a.tpr.push_back(*r.tpr);
    a.nz.push_back(static_cast<double>(r.nz));
    ++a.count;
  }

  std::vector<AggregateRow> rows;
  rows.reserve(keys.size());
  for (size_t i = 0; i < keys.size(); ++i) {
    AggregateRow row;
    row.setting = keys[i].first;
    row.method = keys[i].second;
    row.replications = groups[i].count;
    row.l1 = stat_of(groups[i].l1);
    row.l2 = stat_of(groups[i].l2);
    row.fpr = stat_of(groups[i].fpr);
    row.tpr = stat_of(groups[i].tpr);
    row.nz = stat_of(groups[i].nz);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string format_value(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

struct Setting {
  std::string label;
  SimulationConfig config;
};

std::vector<Setting> expand_settings(const ExperimentSpec& spec) {
  std::vector<Setting> settings;
  if (spec.sweep.parameter.empty()) {
    settings.push_back({"design", spec.design});
    return settings;
  }
  for (double v : spec.sweep.values) {
    Setting s;
    s.config = spec.design;
    if (spec.sweep.parameter == "ratio") {
      const auto [p, q] = sparsity_split(spec.design.p + spec.design.q, v);
      s.config.p = p;
      s.config.q = q;
      if (s.config.beta_support > p) s.config.beta_support = p;
    } else {  // rho
      s.config.rho = v;
    }
    s.label = spec.sweep.parameter + "=" + format_value(v);
    settings.push_back(std::move(s));
  }
  return settings;
}

PrecisionEstimate build_precision(PrecisionSource source, const SimulationInstance& inst,
                                  const GlassoRuleParams& rule) {
  const Index q = inst.data.q();
  if (q == 0) {
    return PrecisionEstimate::make(SymmetricMatrix::identity(0), PrecisionMethod::identity);
  }
  switch (source) {
    case PrecisionSource::known: {
      if (!inst.truth.omega.has_value()) {
        throw InvalidInputError("run_replications: known precision requested but absent");
      }
      return PrecisionEstimate::make(SymmetricMatrix::from(*inst.truth.omega),
                                     PrecisionMethod::known);
    }
    case PrecisionSource::identity:
      return identity_precision(q);
    case PrecisionSource::ridge: {
      const SymmetricMatrix S = sample_covariance(inst.data.W);
      const double eps = std::max(1e-12, 1e-3 * S.mat().diagonal().mean());
      return ridge_inverse_precision(S, eps);
    }
    case PrecisionSource::glasso: {
      const SymmetricMatrix S = sample_covariance(inst.data.W);
      const double lambda_star = glasso_lambda_rule(inst.data.n(), q, rule);
      try {
        return graphical_lasso(S, lambda_star);
      } catch (const Error& e) {
        log::warn("glasso precision failed (", e.what(), "); falling back to ridge inverse");
        const double eps = std::max(1e-12, 1e-3 * S.mat().diagonal().mean());
        return ridge_inverse_precision(S, eps);
      }
    }
  }
  throw InvalidInputError("run_replications: bad precision source");
}

Matrix joint_design(const Dataset& data) {
  Matrix X(data.n(), data.p() + data.q());
  if (data.p() > 0) X.leftCols(data.p()) = data.Z;
  if (data.q() > 0) X.rightCols(data.q()) = data.W;
  return X;
}

Fitter make_fitter(Method method, const NsiConfig& fit) {
  switch (method) {
    case Method::nsi:
      return [fit](const Dataset& d, const PrecisionEstimate& om, double lambda) {
        NsiConfig c = fit;
        c.lambda = lambda;
        return nsi_fit(d, om, c).estimate;
      };
    case Method::lasso:
      return [fit](const Dataset& d, const PrecisionEstimate&, double lambda) {
        LassoConfig c = fit.init_lasso();
        c.lambda = lambda;
        CoefficientEstimate joint = lasso_cd(d.y, joint_design(d), Vector(0), c);
        CoefficientEstimate est;
        est.beta_hat = joint.beta_hat.head(d.p());
        est.gamma_hat = joint.beta_hat.tail(d.q());
        est.lambda = joint.lambda;
        est.n_iterations = joint.n_iterations;
        est.converged = joint.converged;
        est.final_objective = joint.final_objective;
        return est;
      };
    case Method::plugin:
      return [](const Dataset& d, const PrecisionEstimate& om, double lambda) {
        return plugin_fit(d, om, lambda);
      };
  }
  throw InvalidInputError("make_fitter: bad method");
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

ExperimentResult run_replications(const ExperimentSpec& spec) {
  spec.validate();
  const std::vector<Setting> settings = expand_settings(spec);
  const size_t n_methods = spec.methods.size();
  const size_t n_tasks = settings.size() * static_cast<size_t>(spec.replications);

  std::vector<std::optional<ReplicationRecord>> slots(n_tasks * n_methods);
  std::vector<std::vector<std::string>> task_failures(n_tasks);

  auto run_task = [&](size_t task) {
    const size_t setting_index = task / static_cast<size_t>(spec.replications);
    const int rep = static_cast<int>(task % static_cast<size_t>(spec.replications));
    const Setting& setting = settings[setting_index];

    SimulationConfig config = setting.config;
    config.seed = derive_seed(spec.base_seed, setting_index, static_cast<std::uint64_t>(rep));

    SimulationInstance inst;
    PrecisionEstimate* omega_ptr = nullptr;
    std::optional<PrecisionEstimate> omega;
    std::vector<double> grid;
    try {
      inst = gen_instance(config);
      omega.emplace(build_precision(spec.precision, inst, spec.glasso_rule));
      omega_ptr = &*omega;
      grid = default_lambda_grid(inst.data, spec.grid_size, spec.grid_min_ratio);
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << setting.label << " rep=" << rep << " seed=" << config.seed
          << ": generation failed: " << e.what();
      task_failures[task].push_back(msg.str());
      return;
    }

    const std::uint64_t cv_seed = derive_seed(config.seed, 1000);
    for (size_t mi = 0; mi < n_methods; ++mi) {
      const Method method = spec.methods[mi];
      try {
        const Fitter fitter = make_fitter(method, spec.fit);
        const CvResult cv = cv_lambda(inst.data, *omega_ptr, grid, spec.cv_folds, cv_seed, fitter);
        const CoefficientEstimate est = fitter(inst.data, *omega_ptr, cv.best_lambda);
        const MetricsReport report = evaluate(est, inst.truth, spec.fit.zero_tol);

        ReplicationRecord record;
        record.setting = setting.label;
        record.method = method;
        record.replication = rep;
        record.seed = config.seed;
        record.lambda = cv.best_lambda;
        record.n_iterations = est.n_iterations;
        record.converged = est.converged;
        record.l1 = report.l1;
        record.l2 = report.l2;
        record.fpr = report.fpr;
        record.tpr = report.tpr;
        record.nz = report.nz;
        slots[task * n_methods + mi] = std::move(record);
      } catch (const std::exception& e) {
        std::ostringstream msg;
        msg << setting.label << " rep=" << rep << " seed=" << config.seed
            << " method=" << to_string(method) << ": " << e.what();
        task_failures[task].push_back(msg.str());
      }
    }
  };

  const int threads = std::min<int>(resolve_threads(spec.threads), static_cast<int>(n_tasks));
  if (threads <= 1) {
    for (size_t task = 0; task < n_tasks; ++task) run_task(task);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&]() {
        for (size_t task = next.fetch_add(1); task < n_tasks; task = next.fetch_add(1)) {
          run_task(task);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  ExperimentResult result;
  result.records.reserve(slots.size());
  for (auto& slot : slots) {
    if (slot.has_value()) result.records.push_back(std::move(*slot));
  }
  for (auto& failures : task_failures) {
    for (auto& f : failures) {
      log::warn("replication excluded: ", f);
      result.failures.push_back(std::move(f));
    }
  }

  const size_t total = n_tasks * n_methods;
  if (result.failures.size() * 20 > total) {  // > 5%
    std::ostringstream msg;
    msg << "run_replications: " << result.failures.size() << " of " << total
        << " fits failed (" << result.failures.front() << ")";
    throw PipelineError(msg.str());
  }

  result.rows = aggregate_records(result.records);
  return result;
}

Vector column_correlations(const Matrix& X, const Vector& y) {
  if (X.rows() != y.size()) {
    throw InvalidInputError("column_correlations: row mismatch");
  }
  const Index n = X.rows();
  if (n < 2) throw InvalidInputError("column_correlations: need at least two rows");
  const Vector yc = y.array() - y.mean();
  const double y_ss = yc.squaredNorm();
  Vector corr = Vector::Constant(X.cols(), std::numeric_limits<double>::quiet_NaN());
  if (y_ss <= 0.0) return corr;
  for (Index k = 0; k < X.cols(); ++k) {
    const Vector xc = X.col(k).array() - X.col(k).mean();
    const double x_ss = xc.squaredNorm();
    if (x_ss <= 0.0) continue;
    corr[k] = xc.dot(yc) / std::sqrt(x_ss * y_ss);
  }
  return corr;
}

std::vector<Index> correlation_screen(const Matrix& X, const Vector& y, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw InvalidInputError("correlation_screen: threshold must lie in [0, 1]");
  }
  const Vector corr = column_correlations(X, y);
  std::vector<Index> selected;
  for (Index k = 0; k < corr.size(); ++k) {
    if (std::isfinite(corr[k]) && std::abs(corr[k]) >= threshold) {
      selected.push_back(k);
    }
  }
  return selected;
}

std::vector<HoldoutRow> holdout_eval(const Matrix& X, const Vector& y, double split_fraction,
                                     double threshold, const std::vector<Method>& methods,
                                     std::uint64_t seed, const HoldoutOptions& options) {
  if (X.rows() != y.size()) throw InvalidInputError("holdout_eval: row mismatch");
  if (X.rows() < 4) throw InvalidInputError("holdout_eval: need at least four rows");
  if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
    throw InvalidInputError("holdout_eval: split_fraction must lie in (0, 1)");
  }
  if (methods.empty()) throw InvalidInputError("holdout_eval: no methods selected");
  if (!X.allFinite() || !y.allFinite()) {
    throw InvalidInputError("holdout_eval: non-finite inputs");
  }

  const Index n = X.rows();
  std::vector<Index> perm(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
  RngStream rng(seed);
  for (Index i = n - 1; i > 0; --i) {
    const Index j = static_cast<Index>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(j)]);
  }
  Index n_train = static_cast<Index>(std::floor(split_fraction * static_cast<double>(n) + 0.5));
  n_train = std::max<Index>(2, std::min<Index>(n - 2, n_train));
  const Index n_test = n - n_train;

  Matrix x_train(n_train, X.cols());
  Vector y_train(n_train);
  Matrix x_test(n_test, X.cols());
  Vector y_test(n_test);
  for (Index i = 0; i < n_train; ++i) {
    x_train.row(i) = X.row(perm[static_cast<size_t>(i)]);
    y_train[i] = y[perm[static_cast<size_t>(i)]];
  }
  for (Index i = 0; i < n_test; ++i) {
    x_test.row(i) = X.row(perm[static_cast<size_t>(n_train + i)]);
    y_test[i] = y[perm[static_cast<size_t>(n_train + i)]];
  }

  const Vector corr = column_correlations(x_train, y_train);
  std::vector<Index> sparse_cols;
  std::vector<Index> dense_cols;
  for (Index k = 0; k < corr.size(); ++k) {
    if (!std::isfinite(corr[k]) || std::abs(corr[k]) < threshold) continue;
    if (std::abs(corr[k]) >= threshold + options.dense_margin) {
      dense_cols.push_back(k);
    } else {
      sparse_cols.push_back(k);
    }
  }
  if (sparse_cols.size() + dense_cols.size() < 2) {
    throw PipelineError("holdout_eval: fewer than 2 columns passed screening");
  }

  auto gather = [](const Matrix& src, const std::vector<Index>& cols) {
    Matrix out(src.rows(), static_cast<Index>(cols.size()));
    for (size_t i = 0; i < cols.size(); ++i) {
      out.col(static_cast<Index>(i)) = src.col(cols[i]);
    }
    return out;
  };

  Dataset train;
  train.Z = gather(x_train, sparse_cols);
  train.W = gather(x_train, dense_cols);
  train.y = y_train;
  Dataset test;
  test.Z = gather(x_test, sparse_cols);
  test.W = gather(x_test, dense_cols);
  test.y = y_test;

  if (options.center) {
    // training means only; the test side reuses them
    const double y_shift = train.y.mean();
    train.y.array() -= y_shift;
    test.y.array() -= y_shift;
    for (Index k = 0; k < train.Z.cols(); ++k) {
      const double m = train.Z.col(k).mean();
      train.Z.col(k).array() -= m;
      test.Z.col(k).array() -= m;
    }
    for (Index k = 0; k < train.W.cols(); ++k) {
      const double m = train.W.col(k).mean();
      train.W.col(k).array() -= m;
      test.W.col(k).array() -= m;
    }
  }

  PrecisionEstimate omega = [&]() {
    const Index q = train.q();
    if (q == 0) {
      return PrecisionEstimate::make(SymmetricMatrix::identity(0), PrecisionMethod::identity);
    }
    switch (options.precision) {
      case PrecisionSource::known:
        throw InvalidInputError("holdout_eval: known precision is unavailable for external data");
      case PrecisionSource::identity:
        return identity_precision(q);
      case PrecisionSource::ridge: {
        const SymmetricMatrix S = sample_covariance(train.W, options.center);
        return ridge_inverse_precision(S, std::max(1e-12, 1e-3 * S.mat().diagonal().mean()));
      }
      case PrecisionSource::glasso: {
        const SymmetricMatrix S = sample_covariance(train.W, options.center);
        const double lambda_star = glasso_lambda_rule(train.n(), q, options.glasso_rule);
        try {
          return graphical_lasso(S, lambda_star);
        } catch (const Error& e) {
          log::warn("holdout glasso failed (", e.what(), "); using ridge inverse");
          return ridge_inverse_precision(S, std::max(1e-12, 1e-3 * S.mat().diagonal().mean()));
        }
      }
    }
    throw InvalidInputError("holdout_eval: bad precision source");
  }();

  const std::vector<double> grid =
      default_lambda_grid(train, options.grid_size, options.grid_min_ratio);
  const std::uint64_t cv_seed = derive_seed(seed, 2);

  std::vector<HoldoutRow> rows;
  rows.reserve(methods.size());
  for (Method method : methods) {
    const Fitter fitter = make_fitter(method, options.fit);
    const CvResult cv = cv_lambda(train, omega, grid, options.cv_folds, cv_seed, fitter);
    const CoefficientEstimate est = fitter(train, omega, cv.best_lambda);
    Vector pred = Vector::Zero(n_test);
    if (test.p() > 0) pred += test.Z * est.beta_hat;
    if (test.q() > 0) pred += test.W * est.gamma_hat;
    HoldoutRow row;
    row.method = method;
    row.mse = mse(pred, test.y);
    row.lambda = cv.best_lambda;
    row.p = train.p();
    row.q = train.q();
    row.n_train = n_train;
    row.n_test = n_test;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace nsi
