#include "nsi/harness.hpp"
#include "nsi/io.hpp"
#include "nsi/metrics.hpp"
#include "nsi/nsi.hpp"
#include "nsi/precision.hpp"
#include "nsi/rng.hpp"
#include "nsi/simulate.hpp"
#include "nsi/sparse_solver.hpp"
#include "nsi/tuning.hpp"
#include "nsi/version.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace nsi;

namespace {

PrecisionEstimate precision_from_matrix(const Matrix& omega) {
  return PrecisionEstimate::make(SymmetricMatrix::from(omega), PrecisionMethod::known);
}

Dataset make_dataset(const Vector& y, const Matrix& Z, const Matrix& W) {
  Dataset d;
  d.y = y;
  d.Z = Z;
  d.W = W;
  d.validate();
  return d;
}

}  // namespace

PYBIND11_MODULE(_nsi, m) {
  m.doc() = "estimators for linear models with mixed sparse and dense coefficient blocks";
  m.attr("__version__") = NSI_VERSION;

  py::register_exception<InvalidInputError>(m, "InvalidInputError", PyExc_ValueError);
  py::register_exception<NotPositiveDefiniteError>(m, "NotPositiveDefiniteError",
                                                    PyExc_ValueError);
  py::register_exception<UndefinedMetricError>(m, "UndefinedMetricError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<ParseError>(m, "CsvParseError", PyExc_ValueError);
  py::register_exception<PipelineError>(m, "PipelineError", PyExc_RuntimeError);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&make_dataset), py::arg("y"), py::arg("Z"), py::arg("W"))
      .def_readonly("y", &Dataset::y)
      .def_readonly("Z", &Dataset::Z)
      .def_readonly("W", &Dataset::W)
      .def_property_readonly("n", &Dataset::n)
      .def_property_readonly("p", &Dataset::p)
      .def_property_readonly("q", &Dataset::q);

  py::class_<TrueModel>(m, "TrueModel")
      .def_readonly("beta", &TrueModel::beta)
      .def_readonly("gamma", &TrueModel::gamma)
      .def_readonly("sigma", &TrueModel::sigma)
      .def_readonly("omega", &TrueModel::omega)
      .def("support_size", &TrueModel::support_size, py::arg("zero_tol") = 0.0);

  py::class_<CoefficientEstimate>(m, "CoefficientEstimate")
      .def_readonly("beta_hat", &CoefficientEstimate::beta_hat)
      .def_readonly("gamma_hat", &CoefficientEstimate::gamma_hat)
      .def_readonly("lambda_", &CoefficientEstimate::lambda)
      .def_readonly("n_iterations", &CoefficientEstimate::n_iterations)
      .def_readonly("converged", &CoefficientEstimate::converged)
      .def_readonly("final_objective", &CoefficientEstimate::final_objective);

  py::class_<MetricsReport>(m, "MetricsReport")
      .def_readonly("l1", &MetricsReport::l1)
      .def_readonly("l2", &MetricsReport::l2)
      .def_readonly("fpr", &MetricsReport::fpr)
      .def_readonly("tpr", &MetricsReport::tpr)
      .def_readonly("nz", &MetricsReport::nz)
      .def_readonly("mse", &MetricsReport::mse);

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("estimate", &FitResult::estimate)
      .def_readonly("objective_trace", &FitResult::objective_trace)
      .def_readonly("gamma_stationarity", &FitResult::gamma_stationarity)
      .def_readonly("beta_kkt", &FitResult::beta_kkt);

  py::class_<PrecisionEstimate>(m, "PrecisionEstimate")
      .def_property_readonly("omega",
                             [](const PrecisionEstimate& e) { return e.omega_hat.mat(); })
      .def_property_readonly("method",
                             [](const PrecisionEstimate& e) { return to_string(e.method); })
      .def_readonly("lambda_star", &PrecisionEstimate::lambda_star)
      .def_readonly("converged", &PrecisionEstimate::converged)
      .def_property_readonly("dim", &PrecisionEstimate::dim);

  py::class_<SimulationConfig>(m, "SimulationConfig")
      .def(py::init([](Index n, Index p, Index q, double rho, double beta_value,
                       Index beta_support, double gamma_value, double sigma,
                       std::uint64_t seed) {
             SimulationConfig c{n, p, q, rho, beta_value, beta_support, gamma_value, sigma, seed};
             c.validate();
             return c;
           }),
           py::arg("n") = 100, py::arg("p") = 50, py::arg("q") = 50, py::arg("rho") = 0.0,
           py::arg("beta_value") = 4.0, py::arg("beta_support") = 10,
           py::arg("gamma_value") = 6.0, py::arg("sigma") = 1.0, py::arg("seed") = 0)
      .def_readwrite("n", &SimulationConfig::n)
      .def_readwrite("p", &SimulationConfig::p)
      .def_readwrite("q", &SimulationConfig::q)
      .def_readwrite("rho", &SimulationConfig::rho)
      .def_readwrite("beta_value", &SimulationConfig::beta_value)
      .def_readwrite("beta_support", &SimulationConfig::beta_support)
      .def_readwrite("gamma_value", &SimulationConfig::gamma_value)
      .def_readwrite("sigma", &SimulationConfig::sigma)
      .def_readwrite("seed", &SimulationConfig::seed);

  py::class_<SimulationInstance>(m, "SimulationInstance")
      .def_readonly("data", &SimulationInstance::data)
      .def_readonly("truth", &SimulationInstance::truth)
      .def_readonly("epsilon", &SimulationInstance::epsilon)
      .def_readonly("config", &SimulationInstance::config);

  py::class_<CvResult>(m, "CvResult")
      .def_readonly("lambda_grid", &CvResult::lambda_grid)
      .def_readonly("cv_error", &CvResult::cv_error)
      .def_readonly("best_lambda", &CvResult::best_lambda)
      .def_readonly("fold_assignment", &CvResult::fold_assignment);

  // metrics
  m.def("l1_error", &l1_error, py::arg("estimate"), py::arg("truth"));
  m.def("l2_error", &l2_error, py::arg("estimate"), py::arg("truth"));
  m.def("fpr", &fpr, py::arg("estimate"), py::arg("truth"), py::arg("zero_tol") = 0.0);
  m.def("tpr", &tpr, py::arg("estimate"), py::arg("truth"), py::arg("zero_tol") = 0.0);
  m.def("nz", &nz, py::arg("estimate"), py::arg("zero_tol") = 0.0);
  m.def("mse", &mse, py::arg("predicted"), py::arg("actual"));
  m.def("evaluate", &evaluate, py::arg("estimate"), py::arg("truth"), py::arg("zero_tol") = 0.0);

  // sparse solver
  m.def("soft_threshold", &soft_threshold, py::arg("alpha"), py::arg("threshold"));
  m.def(
      "lasso_cd",
      [](const Vector& y, const Matrix& X, const Vector& offset, double lambda, int max_sweeps,
         double tol, bool standardize) {
        return lasso_cd(y, X, offset, LassoConfig{lambda, max_sweeps, tol, standardize});
      },
      py::arg("y"), py::arg("X"), py::arg("offset") = Vector(0), py::arg("lambda_") = 0.0,
      py::arg("max_sweeps") = 1000, py::arg("tol") = 1e-7, py::arg("standardize") = true);
  m.def("kkt_violation", &kkt_violation, py::arg("y"), py::arg("X"), py::arg("offset"),
        py::arg("beta"), py::arg("lambda_"));

  // precision estimation
  m.def("identity_precision", &identity_precision, py::arg("q"));
  m.def(
      "ridge_inverse_precision",
      [](const Matrix& S, double eps) {
        return ridge_inverse_precision(SymmetricMatrix::from(S), eps);
      },
      py::arg("S"), py::arg("eps"));
  m.def("known_precision", &precision_from_matrix, py::arg("omega"));
  m.def(
      "graphical_lasso",
      [](const Matrix& S, double lambda, int max_iter, double tol) {
        return graphical_lasso(SymmetricMatrix::from(S), lambda, max_iter, tol);
      },
      py::arg("S"), py::arg("lambda_"), py::arg("max_iter") = 200, py::arg("tol") = 1e-6);
  m.def(
      "glasso_kkt_residual",
      [](const Matrix& S, const Matrix& omega, double lambda) {
        return glasso_kkt_residual(SymmetricMatrix::from(S), SymmetricMatrix::from(omega),
                                   lambda);
      },
      py::arg("S"), py::arg("omega"), py::arg("lambda_"));
  m.def(
      "glasso_lambda_rule",
      [](Index n, Index dim, double M, double alpha, double tau, const std::string& parse) {
        const LambdaRuleParse mode = parse == "log_of_power" ? LambdaRuleParse::log_of_power
                                                             : LambdaRuleParse::power_of_log;
        return glasso_lambda_rule(n, dim, GlassoRuleParams{M, alpha, tau}, mode);
      },
      py::arg("n"), py::arg("dim"), py::arg("M") = 1.0, py::arg("alpha") = 1.0,
      py::arg("tau") = 1.5, py::arg("parse") = "power_of_log");

  // the iterative estimator and its reference points
  auto fit_config = [](double lambda, int max_outer_iter, double tol, bool standardize,
                       double zero_tol) {
    NsiConfig c;
    c.lambda = lambda;
    c.max_outer_iter = max_outer_iter;
    c.tol = tol;
    c.standardize = standardize;
    c.zero_tol = zero_tol;
    return c;
  };
  m.def(
      "nsi_init",
      [fit_config](const Dataset& data, const PrecisionEstimate& omega, double lambda,
                   int max_outer_iter, double tol, bool standardize, double zero_tol) {
        return nsi_init(data, omega,
                        fit_config(lambda, max_outer_iter, tol, standardize, zero_tol));
      },
      py::arg("data"), py::arg("omega"), py::arg("lambda_"), py::arg("max_outer_iter") = 500,
      py::arg("tol") = 1e-7, py::arg("standardize") = true, py::arg("zero_tol") = 0.0);
  m.def(
      "nsi_fit",
      [fit_config](const Dataset& data, const PrecisionEstimate& omega, double lambda,
                   int max_outer_iter, double tol, bool standardize, double zero_tol) {
        return nsi_fit(data, omega,
                       fit_config(lambda, max_outer_iter, tol, standardize, zero_tol));
      },
      py::arg("data"), py::arg("omega"), py::arg("lambda_"), py::arg("max_outer_iter") = 500,
      py::arg("tol") = 1e-7, py::arg("standardize") = true, py::arg("zero_tol") = 0.0);
  m.def("oracle_fit", &oracle_fit, py::arg("data"), py::arg("true_gamma"), py::arg("omega"),
        py::arg("lambda_"));
  m.def("plugin_fit", &plugin_fit, py::arg("data"), py::arg("omega"), py::arg("lambda_"));

  // simulation
  m.def(
      "make_tridiagonal_precision",
      [](Index dim, double rho) { return make_tridiagonal_precision(dim, rho).mat(); },
      py::arg("dim"), py::arg("rho"));
  m.def("gen_instance", &gen_instance, py::arg("config"));
  m.def("sparsity_split", &sparsity_split, py::arg("p_plus_q"), py::arg("ratio"));

  // tuning
  m.def("kfold_split", &kfold_split, py::arg("n"), py::arg("k"), py::arg("seed"));
  m.def("default_lambda_grid", &default_lambda_grid, py::arg("data"), py::arg("size") = 50,
        py::arg("min_ratio") = 1e-3);
  m.def(
      "cv_lambda",
      [](const Dataset& data, const PrecisionEstimate& omega, std::vector<double> grid, int k,
         std::uint64_t seed, const std::string& method, double tol, int max_outer_iter,
         bool standardize) {
        NsiConfig fit;
        fit.tol = tol;
        fit.max_outer_iter = max_outer_iter;
        fit.standardize = standardize;
        Fitter fitter;
        const Method m_ = method_from_string(method);
        if (m_ == Method::nsi) {
          fitter = [fit](const Dataset& d, const PrecisionEstimate& om, double lambda) {
            NsiConfig c = fit;
            c.lambda = lambda;
            return nsi_fit(d, om, c).estimate;
          };
        } else if (m_ == Method::plugin) {
          fitter = [](const Dataset& d, const PrecisionEstimate& om, double lambda) {
            return plugin_fit(d, om, lambda);
          };
        } else {
          fitter = [fit](const Dataset& d, const PrecisionEstimate&, double lambda) {
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
        }
        return cv_lambda(data, omega, std::move(grid), k, seed, fitter);
      },
      py::arg("data"), py::arg("omega"), py::arg("grid"), py::arg("k"), py::arg("seed"),
      py::arg("method") = "nsi", py::arg("tol") = 1e-7, py::arg("max_outer_iter") = 500,
      py::arg("standardize") = true);

  // screening
  m.def("column_correlations", &column_correlations, py::arg("X"), py::arg("y"));
  m.def("correlation_screen", &correlation_screen, py::arg("X"), py::arg("y"),
        py::arg("threshold"));
}
