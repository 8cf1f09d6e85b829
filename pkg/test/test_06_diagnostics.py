"""
    Tests on decay audits: discretisation budgets, weak dissipation, envelope domination and cross-validation.
"""

import numpy as np
import pytest

from hypocert.model import make_benchmark
from hypocert.rates import certify, certify_thm3, model_constants
from hypocert.solver import (McSeries, cross_validate, domination_check, estimate_observable_decay, make_grid,
                             richardson_budget, run_decay, weak_dissipation_check)
from hypocert.weakpi import Poly, beta_kin

model = make_benchmark("log", 2.0, "gaussian")
grid = make_grid(model, 24, 24)
series = run_decay(model, grid, 1.0, 4.0, tau=1.0)

def test_richardson_budget() -> None:
    """ One refinement gives a finite, non-negative budget; zero levels give none. """
    budget = richardson_budget(series, model, grid, 1.0, levels=1)
    assert budget.refinements == 1
    assert 0.0 <= budget.value < series.l2_sq[0]
    assert budget.value == max(budget.l2, budget.H_tau, budget.pairing)
    assert richardson_budget(series, model, grid, 1.0, levels=0).value == 0.0

def test_domination_by_certificate() -> None:
    """ The simulated energy lies under the certified envelope. """
    cert = certify(model, 1.0, 1.0, oscillation=series.initial_oscillation)
    report = domination_check(series, cert)
    assert report.passed
    assert report.worst_excess <= 0.0
    assert np.all(report.bound >= series.l2_sq)

def test_domination_violation() -> None:
    """ An envelope which is too small is reported, sample by sample. """
    cert = certify_thm3(Poly(1.0, 1.0), 0.0, oscillation=1e-6*series.initial_oscillation)
    report = domination_check(series, cert)
    assert not report.passed
    assert report.worst_excess > 0.0
    assert not report.dominated[0]

def test_weak_dissipation_certified_beta() -> None:
    """ The certified weak Poincaré function holds along the simulated trajectory. """
    spatial, averaging = model_constants(model, 1.0, 1.0)
    beta = beta_kin(model, spatial, averaging, 1.0)
    report = weak_dissipation_check(series, beta, series.initial_oscillation)
    assert report.passed
    assert report.checked > 0
    assert report.to_dict()["passed"] is True

def test_weak_dissipation_failure() -> None:
    """ A weak Poincaré function which is far too small fails the audit at small s. """
    report = weak_dissipation_check(series, Poly(1e-12, 1.0), series.initial_oscillation,
                                    s_grid=np.array([1e-3]))
    assert not report.passed
    assert report.worst_s == 1e-3

def test_weak_dissipation_vacuous_budget() -> None:
    """ Samples whose dissipation is below ten budgets are skipped. """
    report = weak_dissipation_check(series, Poly(1.0, 1.0), series.initial_oscillation, budget=1e6)
    assert report.checked == 0
    assert report.skipped > 0
    assert report.passed

def _fake_mc(c_hat: np.ndarray, stderr: float) -> McSeries:
    times = series.times[:len(c_hat)]
    return McSeries(times, c_hat, np.full(len(c_hat), stderr), np.full(len(c_hat), 1e4), 10_000, 0, False)

def test_cross_validate_synthetic() -> None:
    """ Estimates equal to the solver pairing pass; shifted ones fail. """
    n = 10
    report = cross_validate(series, _fake_mc(series.pairing[:n].copy(), 1e-3))
    assert report.passed
    assert np.all(report.difference < 1e-12)
    shifted = cross_validate(series, _fake_mc(series.pairing[:n]+0.1, 1e-3))
    assert not shifted.passed
    assert shifted.worst_excess == pytest.approx(0.1-3e-3)
    clipped = cross_validate(series, _fake_mc(series.pairing[:n].copy(), 1e-3), t_max=float(series.times[3]))
    assert len(clipped.times) == 4

@pytest.mark.slow
def test_cross_validate_particles() -> None:
    """ Particle autocovariances agree with the finite-volume pairing within three standard errors and the budget. """
    fine = make_grid(model, 64, 64)
    reference = run_decay(model, fine, 1.0, 2.0, tau=1.0)
    budget = richardson_budget(reference, model, fine, 1.0, levels=1)
    mc = estimate_observable_decay(model, 1.0, 2.0, n_particles=50_000, seed=42, dt=0.005, stride=40)
    report = cross_validate(reference, mc, budget.value+0.01)
    assert report.passed, f"worst excess {report.worst_excess}"
