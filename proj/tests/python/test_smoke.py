"""Smoke tests for the Python bindings against the CMake-built module."""

import math

import numpy as np
import pytest

import nsi


def test_version_and_soft_threshold():
    assert nsi.__version__
    assert nsi.soft_threshold(5.0, 2.0) == 3.0
    assert nsi.soft_threshold(-5.0, 2.0) == -3.0
    assert nsi.soft_threshold(1.5, 2.0) == 0.0


def test_simulation_roundtrip_and_determinism():
    config = nsi.SimulationConfig(n=60, p=12, q=8, beta_support=3, seed=11)
    inst = nsi.gen_instance(config)
    assert inst.data.y.shape == (60,)
    assert inst.data.Z.shape == (60, 12)
    assert inst.data.W.shape == (60, 8)
    assert inst.truth.support_size() == 11

    again = nsi.gen_instance(config)
    np.testing.assert_array_equal(inst.data.y, again.data.y)
    np.testing.assert_array_equal(inst.data.Z, again.data.Z)

    other = nsi.gen_instance(nsi.SimulationConfig(n=60, p=12, q=8, beta_support=3, seed=12))
    assert not np.array_equal(inst.data.y, other.data.y)


def test_lasso_against_normal_equations():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((40, 3))
    beta = np.array([2.0, 0.0, -1.0])
    y = x @ beta
    est = nsi.lasso_cd(y, x, np.empty(0), lambda_=1e-9, tol=1e-12)
    assert est.converged
    np.testing.assert_allclose(est.beta_hat, beta, atol=1e-5)


def test_nsi_fit_recovers_planted_model():
    config = nsi.SimulationConfig(n=300, p=10, q=10, beta_support=3, seed=5)
    inst = nsi.gen_instance(config)
    omega = nsi.known_precision(inst.truth.omega)
    lam = 4.0 * math.sqrt(math.log(10) / 300)
    fit = nsi.nsi_fit(inst.data, omega, lambda_=lam)
    assert fit.estimate.converged
    assert nsi.l2_error(fit.estimate, inst.truth) < 2.0
    report = nsi.evaluate(fit.estimate, inst.truth)
    assert report.tpr == 1.0
    # the objective trace never increases
    trace = fit.objective_trace
    assert all(b <= a + 1e-12 for a, b in zip(trace, trace[1:]))


def test_metrics_and_errors():
    config = nsi.SimulationConfig(n=50, p=6, q=4, beta_support=2, seed=3)
    inst = nsi.gen_instance(config)
    omega = nsi.identity_precision(4)
    est = nsi.plugin_fit(inst.data, omega, 0.2)
    assert nsi.nz(est) >= 4  # dense block is never exactly zero
    assert nsi.l1_error(est, inst.truth) >= nsi.l2_error(est, inst.truth)
    with pytest.raises(ValueError):
        nsi.mse(np.zeros(3), np.zeros(4))


def test_graphical_lasso_kkt():
    s = np.array([[1.0, 0.5], [0.5, 1.0]])
    est = nsi.graphical_lasso(s, lambda_=0.1)
    assert est.converged
    assert nsi.glasso_kkt_residual(s, est.omega, 0.1) <= 1e-6
    rule = nsi.glasso_lambda_rule(100, 100, M=1.0, alpha=1.0, tau=2.0)
    assert rule == pytest.approx(4.0 * math.sqrt(math.log(1e4) ** 2 / 100.0))


def test_cv_and_screen():
    config = nsi.SimulationConfig(n=60, p=8, q=6, beta_support=2, seed=9)
    inst = nsi.gen_instance(config)
    omega = nsi.known_precision(inst.truth.omega)
    grid = nsi.default_lambda_grid(inst.data, size=8, min_ratio=0.01)
    assert len(grid) == 8
    result = nsi.cv_lambda(inst.data, omega, grid, k=4, seed=2, method="nsi")
    assert result.best_lambda in grid
    assert len(result.cv_error) == 8

    x = np.column_stack([inst.data.Z, inst.data.W])
    corr = nsi.column_correlations(x, inst.data.y)
    assert corr.shape == (14,)
    selected = nsi.correlation_screen(x, inst.data.y, 0.0)
    assert len(selected) == 14
