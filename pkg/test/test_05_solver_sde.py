"""
    Tests on particle ensembles: exact equilibrium sampling, reproducible noise and Monte Carlo estimates.
"""

from dataclasses import replace
import math

import numpy as np
import pytest

from hypocert.model import ConfigurationError, FloatArray, Model, Potential, integrate, make_benchmark
from hypocert.solver import (BLOCK_SIZE, NonFiniteStateError, SdeEnsemble, centred_datum, estimate_observable_decay,
                             init_ensemble, jackknife, run_ensemble, sample_gibbs, step_sde)

model = make_benchmark("log", 2.0, "gaussian")

class _FreeFlight(Potential):
    """ A logarithmic potential with the force switched off. """

    def grad(self, x: FloatArray) -> FloatArray:
        return np.zeros_like(np.asarray(x, dtype=np.float64))

free_model = replace(model, potential=_FreeFlight("log", 2.0))

energies = [
    ("potential", make_benchmark("log", 4.0, "gaussian").potential),
    ("potential", make_benchmark("subexp", 0.5, "gaussian").potential),
    ("kinetic", make_benchmark("log", 2.0, "gaussian").kinetic),
    ("kinetic", make_benchmark("log", 2.0, "log", 3.0).kinetic),
]

@pytest.mark.parametrize("role, energy", energies)
def test_sample_gibbs(role: str, energy: object) -> None:
    """ Sample means of tanh^2 agree with quadrature within five standard errors. """
    rng = np.random.default_rng(12345)
    n = 100_000
    samples = sample_gibbs(energy, n, rng) # type: ignore[arg-type]
    values = np.tanh(samples)**2
    exact = integrate(lambda x: math.tanh(x)**2, energy.measure()) # type: ignore[attr-defined]
    stderr = float(np.std(values))/math.sqrt(n)
    assert abs(float(np.mean(values))-exact) < 5.0*stderr, f"failed for {role} {energy!r}"

def test_init_ensemble_reproducible() -> None:
    """ The seed determines the initial draws. """
    a = init_ensemble(model, 1000, seed=7, dt=0.01, gamma=1.0)
    b = init_ensemble(model, 1000, seed=7, dt=0.01, gamma=1.0)
    c = init_ensemble(model, 1000, seed=8, dt=0.01, gamma=1.0)
    assert np.array_equal(a.x, b.x) and np.array_equal(a.v, b.v)
    assert not np.array_equal(a.x, c.x)
    assert a.size == 1000 and a.t == 0.0
    with pytest.raises(ConfigurationError):
        init_ensemble(model, 0, seed=7, dt=0.01, gamma=1.0)
    with pytest.raises(ConfigurationError):
        init_ensemble(model, 10, seed=-1, dt=0.01, gamma=1.0)

def test_step_reproducible() -> None:
    """ Stepping twice from the same state gives identical trajectories. """
    ens = init_ensemble(model, 500, seed=3, dt=0.01, gamma=1.0)
    a = run_ensemble(model, ens, 20)
    b = run_ensemble(model, ens, 20)
    assert np.array_equal(a.x, b.x) and np.array_equal(a.v, b.v)
    assert a.step == 20 and a.t == pytest.approx(0.2)

def test_block_streams_independent_of_ensemble_size() -> None:
    """ The first block of particles sees the same noise whatever the ensemble size. """
    ens = init_ensemble(model, BLOCK_SIZE+100, seed=11, dt=0.01, gamma=1.0)
    head = SdeEnsemble(ens.x[:BLOCK_SIZE].copy(), ens.v[:BLOCK_SIZE].copy(), ens.seed, ens.dt, ens.gamma)
    full = step_sde(ens, model)
    part = step_sde(head, model)
    assert np.array_equal(full.x[:BLOCK_SIZE], part.x)
    assert np.array_equal(full.v[:BLOCK_SIZE], part.v)

def test_partial_block_noise_independent_of_size() -> None:
    """ Particles in a partial last block also see the same noise whatever the ensemble size. """
    ens = init_ensemble(model, 300, seed=13, dt=0.01, gamma=1.0)
    head = SdeEnsemble(ens.x[:100].copy(), ens.v[:100].copy(), ens.seed, ens.dt, ens.gamma)
    full = run_ensemble(model, ens, 3)
    part = run_ensemble(model, head, 3)
    assert np.array_equal(full.x[:100], part.x)
    assert np.array_equal(full.v[:100], part.v)

def test_observe_callback() -> None:
    """ The observer is called after every step. """
    seen = []
    ens = init_ensemble(model, 10, seed=0, dt=0.01, gamma=1.0)
    run_ensemble(model, ens, 5, observe=lambda e: seen.append(e.step))
    assert seen == [1, 2, 3, 4, 5]

def test_ensemble_errors() -> None:
    """ Malformed ensembles and non-finite states are rejected. """
    with pytest.raises(ConfigurationError):
        SdeEnsemble(np.zeros(3), np.zeros(4), 0, 0.01, 1.0)
    with pytest.raises(ConfigurationError):
        SdeEnsemble(np.zeros(3), np.zeros(3), 0, 0.0, 1.0)
    bad = SdeEnsemble(np.array([math.nan, 0.0]), np.zeros(2), 0, 0.01, 1.0)
    with pytest.raises(NonFiniteStateError):
        step_sde(bad, model)

def test_stationarity() -> None:
    """ Started at equilibrium, the ensemble stays close to it. """
    ens = init_ensemble(model, 20_000, seed=5, dt=0.01, gamma=1.0)
    ens = run_ensemble(model, ens, 200)
    exact = integrate(lambda v: math.tanh(v)**2, model.nu)
    values = np.tanh(ens.v)**2
    stderr = float(np.std(values))/math.sqrt(ens.size)
    assert abs(float(np.mean(values))-exact) < 5.0*stderr+0.01

def test_jackknife() -> None:
    """ Jackknife means are exact and standard errors match the iid value for independent samples. """
    assert jackknife(np.zeros(100)) == (0.0, 0.0)
    mean, err = jackknife(np.full(50, 2.5))
    assert mean == pytest.approx(2.5) and err < 1e-12
    x = np.random.default_rng(0).standard_normal(100_000)
    mean, err = jackknife(x)
    assert mean == pytest.approx(float(np.mean(x)))
    assert 0.7 < err*math.sqrt(len(x)) < 1.3
    with pytest.raises(ConfigurationError):
        jackknife(np.ones(1))
    with pytest.raises(ConfigurationError):
        estimate_observable_decay(model, 1.0, 0.1, n_particles=1, seed=1)

def test_centred_datum() -> None:
    """ Odd factors have zero equilibrium mean, so the datum is evaluated as is; constants centre to zero. """
    h0 = centred_datum(model, "tanh-xv")
    assert abs(float(h0(np.array([1.0]), np.array([0.5]))[0])-math.tanh(1.0)*math.tanh(0.5)) < 1e-9
    const = centred_datum(model, "constant")
    assert abs(float(const(np.zeros(1), np.zeros(1))[0])) < 1e-9

def test_estimate_observable_decay() -> None:
    """ The autocovariance starts at the datum variance and is reproducible per seed. """
    mc = estimate_observable_decay(model, 1.0, 0.5, n_particles=200, seed=1, dt=0.01, stride=10)
    assert len(mc.times) == 6 and mc.times[0] == 0.0 and mc.times[-1] == pytest.approx(0.5)
    h0 = centred_datum(model, "tanh-x")
    variance = integrate(lambda x: float(h0(np.array([x]), np.zeros(1))[0])**2, model.mu)
    assert abs(mc.c_hat[0]-variance) < 5.0*mc.stderr[0]+0.01
    assert mc.low_ess
    again = estimate_observable_decay(model, 1.0, 0.5, n_particles=200, seed=1, dt=0.01, stride=10)
    assert np.array_equal(mc.c_hat, again.c_hat)
    summary = mc.to_dict()
    assert summary["n_particles"] == 200 and summary["seed"] == 1 and summary["low_ess"] is True
    with pytest.raises(ConfigurationError):
        estimate_observable_decay(model, 1.0, 0.0, n_particles=10, seed=1)

def test_constant_datum_estimate() -> None:
    """ The centred constant datum has zero autocovariance. """
    mc = estimate_observable_decay(model, 1.0, 0.1, n_particles=100, seed=2, dt=0.01, stride=5, datum="constant")
    assert np.all(np.abs(mc.c_hat) < 1e-18)

def test_velocity_relaxation_without_force() -> None:
    """ Gaussian velocities with no force, started at rest: the variance relaxes as 1-exp(-2 gamma t) towards 1. """
    gamma, n = 2.0, 20_000
    ens = SdeEnsemble(np.zeros(n), np.zeros(n), 9, 0.01, gamma)
    for num_steps in (25, 275):
        ens = run_ensemble(free_model, ens, num_steps)
        expected = -math.expm1(-2.0*gamma*ens.t)
        second_moment = float(np.mean(ens.v**2))
        stderr = math.sqrt(2.0/n)*expected
        error_msg = f"failed at t = {ens.t}"
        assert abs(second_moment-expected) < 5.0*stderr, error_msg
        assert abs(float(np.mean(ens.v))) < 5.0*math.sqrt(expected/n), error_msg
    assert ens.t == pytest.approx(3.0)
    assert abs(float(np.var(ens.v))-1.0) < 0.05

@pytest.mark.parametrize("m", [free_model, replace(make_benchmark("log", 2.0, "log", 3.0),
                                                   potential=_FreeFlight("log", 2.0))])
def test_free_transport(m: Model) -> None:
    """ Without friction or force, velocities are frozen and positions move on lines X_t = X_0 + psi'(V_0) t. """
    ens = init_ensemble(m, 1000, seed=4, dt=0.05, gamma=0.0)
    out = run_ensemble(m, ens, 40)
    assert np.array_equal(out.v, ens.v)
    expected = ens.x+m.kinetic.grad(ens.v)*out.t
    assert np.allclose(out.x, expected, rtol=1e-12, atol=1e-10)
