#pragma once

#include "nsi/harness.hpp"
#include "nsi/simulate.hpp"
#include "nsi/types.hpp"

#include <string>
#include <vector>

namespace nsi::cli {

/// Bad command line or config file; exit code 2.
struct UsageError : Error {
  using Error::Error;
};

struct SimulateArgs {
  SimulationConfig config;
  std::string out_dir;
};

struct FitArgs {
  std::string y_path;
  std::string z_path;
  std::string w_path;      // optional; empty means no dense block
  std::string omega_path;  // required for --precision known
  std::string out_dir;
  std::string method = "nsi";
  std::string precision = "glasso";
  double lambda = 0.1;
  NsiConfig fit;
  GlassoRuleParams glasso_rule;
};

struct CvArgs {
  FitArgs data;  // shares data/method/precision options; lambda ignored
  int folds = 10;
  int grid_size = 50;
  double grid_min_ratio = 1e-3;
  std::uint64_t seed = 0;
};

struct BenchArgs {
  std::string config_path;
  std::string manifest_path;
  std::string out_dir = "bench_out";
  int reps_override = -1;
  int threads_override = -1;
  long long seed_override = -1;
};

struct ScreenArgs {
  std::string x_path;
  std::string y_path;
  std::string out_dir;
  double threshold = 0.5;
  double split_fraction = 0.7;
  std::string methods = "nsi,lasso,plugin";
  std::string precision_name = "glasso";
  std::uint64_t seed = 0;
  HoldoutOptions options;
};

struct RunConfig {
  std::string command;
  SimulateArgs simulate;
  FitArgs fit;
  CvArgs cv;
  BenchArgs bench;
  ScreenArgs screen;
};

/// Parse argv (without the program name). Throws UsageError with a message
/// naming the offending flag/key.
RunConfig parse_args(const std::vector<std::string>& args);

/// Load the experiment spec for a bench run: --config (INI) or
/// --from-manifest (JSON), then apply command-line overrides.
ExperimentSpec resolve_bench_spec(const BenchArgs& args);

/// Execute a parsed command. Returns 0 on success.
int run(const RunConfig& config);

/// parse + run + error reporting; returns the process exit code
/// (0 success, 1 runtime failure, 2 usage error).
int main_entry(int argc, const char* const* argv);

}  // namespace nsi::cli
