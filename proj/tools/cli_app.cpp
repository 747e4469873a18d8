#include "cli_app.hpp"

#include "nsi/io.hpp"
#include "nsi/log.hpp"
#include "nsi/metrics.hpp"
#include "nsi/rng.hpp"
#include "nsi/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

namespace nsi::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void add_solver_options(CLI::App* cmd, NsiConfig& fit) {
  cmd->add_option("--tol", fit.tol, "solver convergence tolerance");
  cmd->add_option("--max-iter", fit.max_outer_iter, "outer iteration cap");
  cmd->add_flag("--no-standardize{false}", fit.standardize, "fit on raw column scales");
  cmd->add_option("--zero-tol", fit.zero_tol, "zero threshold for selection metrics");
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> names;
  std::string current;
  std::istringstream in(text);
  while (std::getline(in, current, ',')) {
    if (!current.empty()) names.push_back(current);
  }
  return names;
}

void add_glasso_options(CLI::App* cmd, GlassoRuleParams& rule) {
  cmd->add_option("--glasso-M", rule.M, "tuning-rule constant M");
  cmd->add_option("--glasso-alpha", rule.alpha, "tuning-rule constant alpha");
  cmd->add_option("--glasso-tau", rule.tau, "tuning-rule exponent tau");
}

void add_fit_data_options(CLI::App* cmd, FitArgs& args, bool need_lambda) {
  cmd->add_option("--y", args.y_path, "response CSV (one column)")->required();
  cmd->add_option("--Z", args.z_path, "sparse-block design CSV")->required();
  cmd->add_option("--W", args.w_path, "dense-block design CSV");
  cmd->add_option("--method", args.method, "nsi|lasso|plugin")->default_val("nsi");
  cmd->add_option("--precision", args.precision, "known|identity|ridge|glasso")
      ->default_val("glasso");
  cmd->add_option("--omega", args.omega_path, "precision CSV for --precision known");
  if (need_lambda) {
    cmd->add_option("--lambda", args.lambda, "penalty level")->required();
  }
  cmd->add_option("--out", args.out_dir, "output directory")->required();
  add_solver_options(cmd, args.fit);
  add_glasso_options(cmd, args.glasso_rule);
}

PrecisionEstimate resolve_precision(const FitArgs& args, const Dataset& data) {
  const Index q = data.q();
  if (q == 0) {
    return PrecisionEstimate::make(SymmetricMatrix::identity(0), PrecisionMethod::identity);
  }
  const PrecisionSource source = precision_source_from_string(args.precision);
  switch (source) {
    case PrecisionSource::known: {
      if (args.omega_path.empty()) {
        throw UsageError("--precision known requires --omega");
      }
      const Matrix omega = io::load_matrix_csv(args.omega_path);
      return PrecisionEstimate::make(SymmetricMatrix::from(omega), PrecisionMethod::known);
    }
    case PrecisionSource::identity:
      return identity_precision(q);
    case PrecisionSource::ridge: {
      const SymmetricMatrix S = sample_covariance(data.W);
      return ridge_inverse_precision(S, std::max(1e-12, 1e-3 * S.mat().diagonal().mean()));
    }
    case PrecisionSource::glasso: {
      const SymmetricMatrix S = sample_covariance(data.W);
      const double lambda_star = glasso_lambda_rule(data.n(), q, args.glasso_rule);
      try {
        return graphical_lasso(S, lambda_star);
      } catch (const Error& e) {
        log::warn("glasso precision failed (", e.what(), "); using ridge inverse");
        return ridge_inverse_precision(S, std::max(1e-12, 1e-3 * S.mat().diagonal().mean()));
      }
    }
  }
  throw UsageError("bad --precision value");
}

Dataset load_dataset(const FitArgs& args) {
  Dataset data;
  data.y = io::load_vector_csv(args.y_path);
  data.Z = io::load_matrix_csv(args.z_path);
  if (!args.w_path.empty()) {
    data.W = io::load_matrix_csv(args.w_path);
  } else {
    data.W = Matrix(data.y.size(), 0);
  }
  data.validate();
  return data;
}

Fitter fitter_for(const std::string& method_name, const NsiConfig& fit) {
  const Method method = method_from_string(method_name);
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
        Matrix X(d.n(), d.p() + d.q());
        if (d.p() > 0) X.leftCols(d.p()) = d.Z;
        if (d.q() > 0) X.rightCols(d.q()) = d.W;
        CoefficientEstimate joint = lasso_cd(d.y, X, Vector(0), c);
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
  throw UsageError("bad --method value");
}

void ensure_out_dir(const std::string& dir) {
  if (dir.empty()) throw UsageError("--out must not be empty");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
}

void write_manifest(const std::string& out_dir, const std::string& command, json config) {
  json manifest{{"artifact_version", NSI_VERSION}, {"command", command},
                {"config", std::move(config)}};
  io::write_text_file(out_dir + "/manifest.json", manifest.dump(2) + "\n");
}

int run_simulate(const SimulateArgs& args) {
  ensure_out_dir(args.out_dir);
  const SimulationInstance inst = gen_instance(args.config);
  io::write_vector_csv(args.out_dir + "/y.csv", inst.data.y);
  io::write_matrix_csv(args.out_dir + "/Z.csv", inst.data.Z);
  io::write_matrix_csv(args.out_dir + "/W.csv", inst.data.W);
  io::write_vector_csv(args.out_dir + "/beta.csv", inst.truth.beta);
  io::write_vector_csv(args.out_dir + "/gamma.csv", inst.truth.gamma);
  if (inst.truth.omega.has_value()) {
    io::write_matrix_csv(args.out_dir + "/omega_w.csv", *inst.truth.omega);
  }
  const SimulationConfig& c = args.config;
  write_manifest(args.out_dir, "simulate",
                 json{{"n", c.n},
                      {"p", c.p},
                      {"q", c.q},
                      {"rho", c.rho},
                      {"beta_value", c.beta_value},
                      {"beta_support", c.beta_support},
                      {"gamma_value", c.gamma_value},
                      {"sigma", c.sigma},
                      {"seed", c.seed}});
  std::cout << "wrote instance (n=" << c.n << ", p=" << c.p << ", q=" << c.q << ") to "
            << args.out_dir << "\n";
  return 0;
}

json fit_args_json(const FitArgs& args) {
  return json{{"y", args.y_path},
              {"Z", args.z_path},
              {"W", args.w_path},
              {"omega", args.omega_path},
              {"method", args.method},
              {"precision", args.precision},
              {"lambda", args.lambda},
              {"tol", args.fit.tol},
              {"max_outer_iter", args.fit.max_outer_iter},
              {"standardize", args.fit.standardize},
              {"zero_tol", args.fit.zero_tol}};
}

int run_fit(const FitArgs& args) {
  ensure_out_dir(args.out_dir);
  const Dataset data = load_dataset(args);
  const PrecisionEstimate omega = resolve_precision(args, data);

  json info;
  CoefficientEstimate est;
  if (method_from_string(args.method) == Method::nsi) {
    NsiConfig c = args.fit;
    c.lambda = args.lambda;
    FitResult result = nsi_fit(data, omega, c);
    est = result.estimate;
    info["gamma_stationarity"] = result.gamma_stationarity;
    info["beta_kkt"] = result.beta_kkt;
    info["objective_trace_length"] = result.objective_trace.size();
  } else {
    est = fitter_for(args.method, args.fit)(data, omega, args.lambda);
  }
  io::write_vector_csv(args.out_dir + "/beta_hat.csv", est.beta_hat);
  io::write_vector_csv(args.out_dir + "/gamma_hat.csv", est.gamma_hat);
  info["lambda"] = est.lambda;
  info["n_iterations"] = est.n_iterations;
  info["converged"] = est.converged;
  info["final_objective"] = est.final_objective;
  info["nz"] = nz(est, args.fit.zero_tol);
  io::write_text_file(args.out_dir + "/fit.json", info.dump(2) + "\n");
  write_manifest(args.out_dir, "fit", fit_args_json(args));
  std::cout << "fit " << args.method << ": lambda=" << est.lambda
            << " nz=" << nz(est, args.fit.zero_tol) << " converged=" << est.converged << "\n";
  return 0;
}

int run_cv(const CvArgs& args) {
  ensure_out_dir(args.data.out_dir);
  const Dataset data = load_dataset(args.data);
  const PrecisionEstimate omega = resolve_precision(args.data, data);
  const std::vector<double> grid =
      default_lambda_grid(data, args.grid_size, args.grid_min_ratio);
  const Fitter fitter = fitter_for(args.data.method, args.data.fit);
  const CvResult cv = cv_lambda(data, omega, grid, args.folds, args.seed, fitter);

  std::ostringstream table;
  table << "lambda,cv_error\n";
  table.precision(17);
  for (size_t i = 0; i < cv.lambda_grid.size(); ++i) {
    table << cv.lambda_grid[i] << ',' << cv.cv_error[i] << '\n';
  }
  io::write_text_file(args.data.out_dir + "/cv.csv", table.str());

  json summary{{"best_lambda", cv.best_lambda},
               {"folds", args.folds},
               {"seed", args.seed},
               {"grid_size", args.grid_size},
               {"grid_min_ratio", args.grid_min_ratio},
               {"method", args.data.method}};
  io::write_text_file(args.data.out_dir + "/cv.json", summary.dump(2) + "\n");

  json config = fit_args_json(args.data);
  config["folds"] = args.folds;
  config["grid_size"] = args.grid_size;
  config["grid_min_ratio"] = args.grid_min_ratio;
  config["seed"] = args.seed;
  write_manifest(args.data.out_dir, "cv", std::move(config));
  std::cout << "cv " << args.data.method << ": best lambda = " << cv.best_lambda << "\n";
  return 0;
}

int run_bench(const BenchArgs& args) {
  ensure_out_dir(args.out_dir);
  const ExperimentSpec spec = resolve_bench_spec(args);
  const ExperimentResult result = run_replications(spec);

  io::write_records_jsonl(args.out_dir + "/records.jsonl", result.records);
  io::emit_table(result.rows, args.out_dir + "/table.csv", io::TableFormat::csv);
  io::emit_table(result.rows, args.out_dir + "/table.md", io::TableFormat::markdown);
  write_manifest(args.out_dir, "bench", json::parse(io::experiment_to_json(spec)));

  std::cout << io::read_text_file(args.out_dir + "/table.md");
  if (!result.failures.empty()) {
    std::cout << result.failures.size() << " replication(s) excluded; see log\n";
  }
  return 0;
}

int run_screen(const ScreenArgs& args) {
  ensure_out_dir(args.out_dir);
  const Matrix X = io::load_matrix_csv(args.x_path);
  const Vector y = io::load_vector_csv(args.y_path);
  std::vector<Method> methods;
  for (const auto& name : split_names(args.methods)) {
    methods.push_back(method_from_string(name));
  }
  const std::vector<HoldoutRow> rows =
      holdout_eval(X, y, args.split_fraction, args.threshold, methods, args.seed, args.options);

  std::ostringstream table;
  table << "method,mse,lambda,p,q,n_train,n_test\n";
  table.precision(17);
  for (const auto& row : rows) {
    table << to_string(row.method) << ',' << row.mse << ',' << row.lambda << ',' << row.p << ','
          << row.q << ',' << row.n_train << ',' << row.n_test << '\n';
  }
  io::write_text_file(args.out_dir + "/mse.csv", table.str());
  write_manifest(args.out_dir, "screen",
                 json{{"x", args.x_path},
                      {"y", args.y_path},
                      {"threshold", args.threshold},
                      {"split_fraction", args.split_fraction},
                      {"methods", args.methods},
                      {"seed", args.seed},
                      {"cv_folds", args.options.cv_folds},
                      {"dense_margin", args.options.dense_margin},
                      {"center", args.options.center},
                      {"precision", to_string(args.options.precision)}});
  for (const auto& row : rows) {
    std::cout << to_string(row.method) << ": holdout mse = " << row.mse << " (p=" << row.p
              << ", q=" << row.q << ")\n";
  }
  return 0;
}

}  // namespace

RunConfig parse_args(const std::vector<std::string>& args) {
  RunConfig rc;
  CLI::App app{"estimation for linear models with mixed sparse and dense coefficient blocks"};
  app.require_subcommand(1);

  CLI::App* sim = app.add_subcommand("simulate", "generate a benchmark instance as CSV files");
  sim->add_option("--n", rc.simulate.config.n, "rows");
  sim->add_option("--p", rc.simulate.config.p, "sparse-block columns");
  sim->add_option("--q", rc.simulate.config.q, "dense-block columns");
  sim->add_option("--rho", rc.simulate.config.rho, "tridiagonal precision off-diagonal");
  sim->add_option("--beta-value", rc.simulate.config.beta_value, "active sparse coefficient");
  sim->add_option("--beta-support", rc.simulate.config.beta_support, "number of active betas");
  sim->add_option("--gamma-value", rc.simulate.config.gamma_value, "dense coefficient");
  sim->add_option("--sigma", rc.simulate.config.sigma, "noise standard deviation");
  sim->add_option("--seed", rc.simulate.config.seed, "rng seed");
  sim->add_option("--out", rc.simulate.out_dir, "output directory")->required();

  CLI::App* fit = app.add_subcommand("fit", "fit one dataset with one method");
  add_fit_data_options(fit, rc.fit, true);

  CLI::App* cv = app.add_subcommand("cv", "cross-validated lambda selection");
  add_fit_data_options(cv, rc.cv.data, false);
  cv->add_option("--folds", rc.cv.folds, "number of folds");
  cv->add_option("--grid-size", rc.cv.grid_size, "lambda grid size");
  cv->add_option("--grid-min-ratio", rc.cv.grid_min_ratio, "smallest lambda as a fraction");
  cv->add_option("--seed", rc.cv.seed, "fold-assignment seed");

  CLI::App* bench = app.add_subcommand("bench", "replicate benchmark tables from a config");
  bench->add_option("--config", rc.bench.config_path, "experiment config (INI)");
  bench->add_option("--from-manifest", rc.bench.manifest_path, "rerun from a manifest.json");
  bench->add_option("--reps", rc.bench.reps_override, "override replication count");
  bench->add_option("--threads", rc.bench.threads_override, "worker threads (0 = all cores)");
  bench->add_option("--seed", rc.bench.seed_override, "override base seed");
  bench->add_option("--out", rc.bench.out_dir, "output directory");

  CLI::App* screen = app.add_subcommand("screen", "correlation screening + holdout evaluation");
  screen->add_option("--x", rc.screen.x_path, "predictor matrix CSV")->required();
  screen->add_option("--y", rc.screen.y_path, "response CSV")->required();
  screen->add_option("--threshold", rc.screen.threshold, "|correlation| screening threshold");
  screen->add_option("--split", rc.screen.split_fraction, "training fraction");
  screen->add_option("--methods", rc.screen.methods, "comma-separated methods");
  screen->add_option("--seed", rc.screen.seed, "row-shuffle seed");
  screen->add_option("--folds", rc.screen.options.cv_folds, "cv folds");
  screen->add_option("--dense-margin", rc.screen.options.dense_margin,
                     "extra |correlation| needed for the dense block");
  screen->add_option("--precision", rc.screen.precision_name, "identity|ridge|glasso");
  screen->add_option("--out", rc.screen.out_dir, "output directory")->required();

  std::vector<const char*> argv;
  argv.push_back("nsi");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  rc.command = app.get_subcommands().front()->get_name();
  if (rc.command == "bench" && rc.bench.config_path.empty() && rc.bench.manifest_path.empty()) {
    throw UsageError("bench requires --config or --from-manifest");
  }
  if (rc.command == "screen") {
    rc.screen.options.precision = precision_source_from_string(rc.screen.precision_name);
  }
  return rc;
}

ExperimentSpec resolve_bench_spec(const BenchArgs& args) {
  ExperimentSpec spec;
  if (!args.manifest_path.empty()) {
    json manifest;
    try {
      manifest = json::parse(io::read_text_file(args.manifest_path));
    } catch (const json::exception& e) {
      throw ParseError(std::string("manifest: ") + e.what());
    }
    if (!manifest.contains("config")) {
      throw ParseError("manifest: missing 'config' section");
    }
    spec = io::experiment_from_json(manifest["config"].dump());
  } else {
    spec = io::load_experiment_config(args.config_path);
  }
  if (args.reps_override >= 0) spec.replications = args.reps_override;
  if (args.threads_override >= 0) spec.threads = args.threads_override;
  if (args.seed_override >= 0) spec.base_seed = static_cast<std::uint64_t>(args.seed_override);
  spec.validate();
  return spec;
}

int run(const RunConfig& config) {
  if (config.command == "simulate") return run_simulate(config.simulate);
  if (config.command == "fit") return run_fit(config.fit);
  if (config.command == "cv") return run_cv(config.cv);
  if (config.command == "bench") return run_bench(config.bench);
  if (config.command == "screen") return run_screen(config.screen);
  throw UsageError("unknown command '" + config.command + "'");
}

int main_entry(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  try {
    const RunConfig config = parse_args(args);
    return run(config);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace nsi::cli
