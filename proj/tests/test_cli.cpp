#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cli_app.hpp"
#include "nsi/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace nsi;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("load_matrix_csv basics") {
  TempDir dir("nsi_csv_test");
  write_file(dir.file("plain.csv"), "1,2\n3,4\n");
  const Matrix m = io::load_matrix_csv(dir.file("plain.csv"));
  REQUIRE(m.rows() == 2);
  REQUIRE(m.cols() == 2);
  CHECK(m(0, 0) == 1.0);
  CHECK(m(1, 1) == 4.0);

  write_file(dir.file("header.csv"), "a,b\n1,2\n");
  const Matrix h = io::load_matrix_csv(dir.file("header.csv"));
  REQUIRE(h.rows() == 1);
  CHECK(h(0, 1) == 2.0);

  write_file(dir.file("spaced.csv"), " 1 , 2 \r\n 3 , 4 \n\n");
  const Matrix s = io::load_matrix_csv(dir.file("spaced.csv"));
  CHECK(s(1, 0) == 3.0);
}

TEST_CASE("load_matrix_csv errors carry locations") {
  TempDir dir("nsi_csv_err_test");
  write_file(dir.file("ragged.csv"), "1,2\n3\n");
  try {
    io::load_matrix_csv(dir.file("ragged.csv"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }

  write_file(dir.file("badcell.csv"), "1,2\n3,zz\n");
  try {
    io::load_matrix_csv(dir.file("badcell.csv"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    const std::string what = e.what();
    CHECK(what.find("row 2") != std::string::npos);
    CHECK(what.find("column 2") != std::string::npos);
  }

  write_file(dir.file("empty.csv"), "");
  CHECK_THROWS_AS(io::load_matrix_csv(dir.file("empty.csv")), ParseError);
  CHECK_THROWS_AS(io::load_matrix_csv(dir.file("missing.csv")), ParseError);

  write_file(dir.file("vec.csv"), "1,2\n3,4\n");
  CHECK_THROWS_AS(io::load_vector_csv(dir.file("vec.csv")), ParseError);
}

TEST_CASE("matrix csv round-trips at full precision") {
  TempDir dir("nsi_csv_rt_test");
  Matrix m(2, 3);
  m << 1.0 / 3.0, -2.718281828459045, 1e-17, 3.141592653589793, 0.0, -1234.5678901234567;
  io::write_matrix_csv(dir.file("m.csv"), m);
  const Matrix back = io::load_matrix_csv(dir.file("m.csv"));
  REQUIRE(back.rows() == 2);
  for (Index r = 0; r < 2; ++r) {
    for (Index c = 0; c < 3; ++c) {
      CHECK(back(r, c) == m(r, c));
    }
  }
}

TEST_CASE("emit_table csv and markdown") {
  TempDir dir("nsi_table_test");
  AggregateRow row;
  row.setting = "ratio=0.5";
  row.method = Method::nsi;
  row.replications = 2;
  row.l2 = {10.947, 2.018, 2};
  row.l1 = {67.395, 13.566, 2};
  row.fpr = {0.046, 0.038, 2};
  row.tpr = {0.988, 0.016, 2};
  row.nz = {61.14, 1.457, 2};

  io::emit_table({row}, dir.file("t.csv"), io::TableFormat::csv);

  std::ifstream in(dir.file("t.csv"));
  std::string header, line;
  std::getline(in, header);
  std::getline(in, line);
  CHECK(header.find("l2_mean") != std::string::npos);
  CHECK(line.find("ratio=0.5,nsi,2,") == 0);

  io::emit_table({row}, dir.file("t.md"), io::TableFormat::markdown);
  const std::string md = io::read_text_file(dir.file("t.md"));
  CHECK(md.find("| 10.947(2.018) |") != std::string::npos);
  CHECK(md.find("| 61.14(1.457) |") != std::string::npos);

  CHECK(io::format_cell(10.947, 2.018) == "10.947(2.018)");
  CHECK_THROWS_AS(io::emit_table({}, dir.file("x.csv"), io::TableFormat::csv),
                  InvalidInputError);
}

TEST_CASE("csv table round-trips aggregate values exactly") {
  TempDir dir("nsi_table_rt_test");
  AggregateRow row;
  row.setting = "rho=0.3";
  row.method = Method::lasso;
  row.replications = 3;
  row.l2 = {13.256298471923847, 1.5620000000000003, 3};
  row.l1 = {80.70612345678901, 10.409, 3};
  row.fpr = {0.0980001, 0.047, 3};
  row.tpr = {0.955, 0.028, 3};
  row.nz = {58.38, 2.415, 3};
  io::emit_table({row}, dir.file("t.csv"), io::TableFormat::csv);

  std::ifstream in(dir.file("t.csv"));
  std::string header, line;
  std::getline(in, header);
  std::getline(in, line);
  // strip the leading text fields, parse the numeric remainder
  const std::string numeric = line.substr(line.find(",lasso,") + 7);
  Matrix values(1, 1);
  {
    std::ofstream tmp(dir.file("nums.csv"));
    tmp << numeric << "\n";
  }
  values = io::load_matrix_csv(dir.file("nums.csv"));
  CHECK(values(0, 1) == row.l2.mean);
  CHECK(values(0, 2) == row.l2.sd);
  CHECK(values(0, 3) == row.l1.mean);
  CHECK(values(0, 9) == row.nz.mean);
}

TEST_CASE("experiment config parsing and overrides") {
  TempDir dir("nsi_cfg_test");
  write_file(dir.file("exp.cfg"),
             "# Example-1 style run\n"
             "[design]\n"
             "n = 40\n"
             "p = 10\n"
             "q = 10\n"
             "sigma = 1\n"
             "beta_support = 3\n"
             "[sweep]\n"
             "parameter = ratio\n"
             "values = 0.5, 0.8\n"
             "[experiment]\n"
             "methods = nsi,lasso\n"
             "replications = 5\n"
             "base_seed = 99\n"
             "cv_folds = 4\n"
             "grid_size = 6\n"
             "precision = known\n"
             "[solver]\n"
             "tol = 1e-6\n"
             "standardize = true\n");
  const ExperimentSpec spec = io::load_experiment_config(dir.file("exp.cfg"));
  CHECK(spec.design.n == 40);
  CHECK(spec.sweep.values.size() == 2);
  CHECK(spec.methods.size() == 2);
  CHECK(spec.replications == 5);
  CHECK(spec.fit.tol == 1e-6);
  CHECK(spec.precision == PrecisionSource::known);

  // json round trip
  const ExperimentSpec back = io::experiment_from_json(io::experiment_to_json(spec));
  CHECK(back.design.n == spec.design.n);
  CHECK(back.sweep.values == spec.sweep.values);
  CHECK(back.base_seed == spec.base_seed);
  CHECK(back.fit.tol == spec.fit.tol);

  // command line overrides the file
  cli::BenchArgs bench;
  bench.config_path = dir.file("exp.cfg");
  bench.reps_override = 100;
  const ExperimentSpec resolved = cli::resolve_bench_spec(bench);
  CHECK(resolved.replications == 100);
  cli::BenchArgs plain;
  plain.config_path = dir.file("exp.cfg");
  CHECK(cli::resolve_bench_spec(plain).replications == 5);

  write_file(dir.file("bad.cfg"), "[design]\nn = 40\nwhatever = 3\n");
  try {
    io::load_experiment_config(dir.file("bad.cfg"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("design.whatever") != std::string::npos);
  }
  write_file(dir.file("badsec.cfg"), "[nope]\nn = 40\n");
  CHECK_THROWS_AS(io::load_experiment_config(dir.file("badsec.cfg")), ParseError);
}

TEST_CASE("parse_args surfaces usage errors with the offending name") {
  try {
    cli::parse_args({"simulate", "--bogus", "3", "--out", "x"});
    FAIL("expected UsageError");
  } catch (const cli::UsageError& e) {
    CHECK(std::string(e.what()).find("--bogus") != std::string::npos);
  }
  try {
    cli::parse_args({"simulate"});
    FAIL("expected UsageError");
  } catch (const cli::UsageError& e) {
    CHECK(std::string(e.what()).find("--out") != std::string::npos);
  }
  try {
    cli::parse_args({"bench", "--out", "somewhere"});
    FAIL("expected UsageError");
  } catch (const cli::UsageError& e) {
    CHECK(std::string(e.what()).find("--config") != std::string::npos);
  }
  CHECK_THROWS_AS(cli::parse_args({}), cli::UsageError);
  CHECK_THROWS_AS(cli::parse_args({"frobnicate"}), cli::UsageError);

  const auto rc = cli::parse_args({"bench", "--config", "f.cfg", "--reps", "100",
                                   "--threads", "2", "--out", "d"});
  CHECK(rc.command == "bench");
  CHECK(rc.bench.reps_override == 100);
  CHECK(rc.bench.threads_override == 2);
}

TEST_CASE("simulate then fit through the command layer") {
  TempDir dir("nsi_cli_run_test");
  const auto sim = cli::parse_args({"simulate", "--n", "30", "--p", "6", "--q", "4",
                                    "--beta-support", "2", "--seed", "5", "--out",
                                    dir.file("inst")});
  REQUIRE(cli::run(sim) == 0);
  CHECK(fs::exists(dir.file("inst") + "/y.csv"));
  CHECK(fs::exists(dir.file("inst") + "/Z.csv"));
  CHECK(fs::exists(dir.file("inst") + "/W.csv"));
  CHECK(fs::exists(dir.file("inst") + "/omega_w.csv"));
  CHECK(fs::exists(dir.file("inst") + "/manifest.json"));

  const auto fit = cli::parse_args({"fit", "--y", dir.file("inst") + "/y.csv", "--Z",
                                    dir.file("inst") + "/Z.csv", "--W",
                                    dir.file("inst") + "/W.csv", "--method", "nsi",
                                    "--precision", "known", "--omega",
                                    dir.file("inst") + "/omega_w.csv", "--lambda", "0.3",
                                    "--out", dir.file("fit")});
  REQUIRE(cli::run(fit) == 0);
  CHECK(fs::exists(dir.file("fit") + "/beta_hat.csv"));
  CHECK(fs::exists(dir.file("fit") + "/gamma_hat.csv"));
  CHECK(fs::exists(dir.file("fit") + "/fit.json"));
  const Vector beta_hat = io::load_vector_csv(dir.file("fit") + "/beta_hat.csv");
  CHECK(beta_hat.size() == 6);
}
