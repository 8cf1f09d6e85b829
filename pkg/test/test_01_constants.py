"""
    Tests on the explicit constants: weight normalizer, remainder, divergence-equation constants,
    averaging-lemma constants and the algebraic envelope constants.
"""

import math

import pytest

from hypocert.model import ConfigurationError, make_benchmark
from hypocert.constants import (compute_Zw, compute_Rwtau, compute_C0_C1, compute_C_Lions, compute_spatial_constants,
                                compute_velocity_moments, compute_averaging_constants, compute_theorem1_constants,
                                invert_increasing)

def _C0_C1_reference(tau: float, P: float, Z: float, M: float) -> tuple:
    """ Independent evaluation of C0, C1 from the displayed formulas, with the naive remainder. """
    s = tau/math.sqrt(P)
    R = 2.0*tau*math.exp(-s)/(math.sqrt(P)*(1.0-math.exp(-2.0*s)))
    c0 = math.sqrt(3.0)*max(tau/math.pi, math.sqrt(40.0*P/(1.0-R)))
    a = math.sqrt(2.0+4.0/Z+M*max(tau**2/math.pi**2, P))
    b = math.sqrt((53.0+36.0*(1.0/Z+M*P+(1.0+2.0/(1.0-math.exp(-s)))**2))/(1.0-R))
    return c0, math.sqrt(3.0)*max(a, b)

def test_log_gaussian_constants() -> None:
    """ Log(p=2) + Gaussian, d = 1, tau = 1: closed-form Z_W, P_W, and R_W_tau in (0, 1). """
    model = make_benchmark("log", 2.0, "gaussian")
    z_w = compute_Zw(model)
    assert abs(z_w-2.0/3.0) < 1e-6
    spatial = compute_spatial_constants(model, 1.0)
    assert spatial.P_W == model.weight.P
    assert abs(spatial.P_W-2.0/(spatial.Z_W*2.0)) < 1e-12
    assert 0.0 < spatial.R_W_tau < 1.0

def test_C0_C1_reference() -> None:
    """ C0, C1 and C_Lions agree with an independent evaluation to relative 1e-12. """
    model = make_benchmark("log", 2.0, "gaussian")
    for tau in (0.5, 1.0, 3.0):
        spatial = compute_spatial_constants(model, tau)
        c0, c1 = _C0_C1_reference(tau, spatial.P_W, spatial.Z_W, model.potential.hessian_bound)
        error_msg = f"failed at tau = {tau}"
        assert abs(spatial.C0/c0-1.0) < 1e-12, error_msg
        assert abs(spatial.C1/c1-1.0) < 1e-12, error_msg
        c_lions = math.sqrt((1.0+2.0/spatial.Z_W)*c1**2+(1.0+2.0*spatial.theta_W**2)*c0**2)
        assert abs(spatial.C_Lions/c_lions-1.0) < 1e-12, error_msg

def test_Rwtau_closed_form() -> None:
    """ R_W_tau = s/sinh(s) with s = tau/sqrt(P_W), including the small-s branch. """
    for P, tau in ((1.0, 1.0), (1.5, 1.0), (2.0, 0.25), (1.0, 30.0), (1.0, 1e-6)):
        s = tau/math.sqrt(P)
        assert abs(compute_Rwtau(P, tau)-s/math.sinh(s)) < 1e-12, f"failed at P = {P}, tau = {tau}"
    assert compute_Rwtau(1.0, 1000.0) > 0.0

def test_C_Lions_examples() -> None:
    """ C_Lions on hand-computed inputs. """
    assert compute_C_Lions(0.0, 1.0, 2.0, 1.0) == math.sqrt(2.0)
    assert abs(compute_C_Lions(1.0, 1.0, 1.0, 1.0)-math.sqrt(6.0)) < 1e-15

def test_constant_errors() -> None:
    """ Non-positive inputs and a remainder of 1 are rejected. """
    with pytest.raises(ConfigurationError):
        compute_Rwtau(0.0, 1.0)
    with pytest.raises(ConfigurationError):
        compute_Rwtau(1.0, -1.0)
    with pytest.raises(ConfigurationError):
        compute_C0_C1(1.0, 1.0, 1.0, 1.0, 1.0)
    with pytest.raises(ConfigurationError):
        compute_spatial_constants(make_benchmark("log", 2.0, "gaussian"), 0.0)

def test_gaussian_velocity_moments() -> None:
    """ For the standard Gaussian, the gradient moments are E[v^2] = 1, E[v^4] = 3 and the Hessian moment is 1. """
    model = make_benchmark("log", 2.0, "gaussian")
    mom = compute_velocity_moments(model.kinetic)
    assert abs(mom.n2-1.0) < 1e-8
    assert abs(mom.n4-3.0) < 1e-8
    assert abs(mom.h2-1.0) < 1e-8
    assert abs(mom.rho_scrM-1.0) < 1e-8
    assert abs(mom.rho_calM-1.0) < 1e-8

def test_averaging_constants_scale_with_lions() -> None:
    """ The averaging constants are positive and proportional to C_Lions. """
    model = make_benchmark("log", 2.0, "gaussian")
    spatial = compute_spatial_constants(model, 1.0)
    mom = compute_velocity_moments(model.kinetic)
    avg = compute_averaging_constants(spatial, mom, model.potential.lipschitz)
    assert avg.C0_tau > spatial.C_Lions > 0.0
    assert avg.C1_tau > spatial.C_Lions
    expected = spatial.C_Lions*(spatial.Z_W**-0.5+mom.rho_calM*mom.gH1/math.sqrt(mom.n2))
    assert abs(avg.C1_tau/expected-1.0) < 1e-12

def test_theorem1_case_i_envelope() -> None:
    """ Case (i): the energy bound starts at the initial energy, decreases, and has exponent sigma/2. """
    model = make_benchmark("log", 2.0, "gaussian")
    spatial = compute_spatial_constants(model, 1.0)
    avg = compute_averaging_constants(spatial, compute_velocity_moments(model.kinetic), model.potential.lipschitz)
    wrc = compute_theorem1_constants(model, spatial, avg, 1.0, 1.0, "i")
    assert wrc.exponent == 0.5
    assert wrc.energy_bound(0.0) == 1.0
    values = [wrc.energy_bound(t) for t in (1.0, 10.0, 1e3, 1e6, 1e9, 1e27, 1e30)]
    assert all(a >= b for a, b in zip(values, values[1:]))
    assert values[-1] < values[0]
    slope = math.log(values[-1]/values[-2])/math.log(1e3)
    assert abs(slope+0.5) < 0.05
    assert abs(wrc.A1*wrc.phi0+wrc.A2*wrc.phi0**(1.0/3.0)-1.0) < 1e-10

def test_theorem1_case_ii_exponent() -> None:
    """ Case (ii): exponent sigma delta / (2 (sigma + delta + 2)). """
    model = make_benchmark("log", 2.0, "subexp", 0.5)
    spatial = compute_spatial_constants(model, 1.0)
    avg = compute_averaging_constants(spatial, compute_velocity_moments(model.kinetic), model.potential.lipschitz)
    wrc = compute_theorem1_constants(model, spatial, avg, 1.0, 1.0, "ii")
    sigma, delta = model.weight.sigma, model.velocity.delta_w
    assert abs(wrc.exponent-sigma*delta/(2.0*(sigma+delta+2.0))) < 1e-15
    assert wrc.energy_bound(1e300) < wrc.energy_bound(10.0) <= wrc.energy_bound(1.0) <= 1.0

def test_theorem1_case_mismatch() -> None:
    """ Case (ii) needs a square-integrable velocity weight, which the Gaussian model lacks. """
    model = make_benchmark("log", 2.0, "gaussian")
    spatial = compute_spatial_constants(model, 1.0)
    avg = compute_averaging_constants(spatial, compute_velocity_moments(model.kinetic), model.potential.lipschitz)
    with pytest.raises(ConfigurationError):
        compute_theorem1_constants(model, spatial, avg, 1.0, 1.0, "ii")
    with pytest.raises(ConfigurationError):
        compute_theorem1_constants(model, spatial, avg, 0.0, 1.0, "i")

def test_invert_increasing() -> None:
    """ Inverts increasing maps with f(0) = 0. """
    assert invert_increasing(lambda y: y, 1.0) == 1.0
    assert invert_increasing(lambda y: y, 0.0) == 0.0
    for target in (1e-6, 0.3, 7.0, 1e5):
        y = invert_increasing(lambda y: y**3+y, target)
        assert abs(y**3+y-target) <= 1e-10*target, f"failed at target = {target}"
