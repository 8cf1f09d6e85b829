"""
    Tests on weak Poincaré functions, their shifts and chaining, convex conjugates and rate functions.
"""

import math
from typing import List

import numpy as np
import pytest
from scipy import stats

from hypocert.model import ConfigurationError, make_benchmark
from hypocert.constants import compute_averaging_constants, compute_spatial_constants, compute_velocity_moments
from hypocert.weakpi import (BetaFn, Poly, StretchedExp, Scaled, Shifted, Tail, ShiftThresholdError,
                             beta_appendix_a, beta_kin, beta_tail_x, beta_threshold, beta_velocity, beta_weighted,
                             chain, chain_objective, get_options, kstar_shift_bound, legendre_kstar, options,
                             rate_function, set_options, reset_options, shift)

log_grid = np.geomspace(1e-3, 1e9, 60)
closed_form_betas: List[BetaFn] = [Poly(1.0, 1.0), Poly(2.0, 3.0), StretchedExp(1.0, 1.0, 0.5)]

def _brute_conjugate(beta: BetaFn, w: float) -> float:
    """ Conjugate at w by maximisation over a dense u grid. """
    u = np.geomspace(1e-12, 1e6, 10**6)
    return float(np.max(u*(w-beta(1.0/u))))

def _kinetic_beta(kind: str, param: float, kinetic: str, kinetic_param: float = 2.0) -> BetaFn:
    model = make_benchmark(kind, param, kinetic, kinetic_param) # type: ignore[arg-type]
    spatial = compute_spatial_constants(model, 1.0)
    averaging = compute_averaging_constants(spatial, compute_velocity_moments(model.kinetic), model.potential.lipschitz)
    return beta_kin(model, spatial, averaging, 1.0)

@pytest.mark.parametrize("beta", closed_form_betas+[Shifted(Poly(1.0, 1.0), 2.0), Scaled(Poly(1.0, 2.0), 2.0, 3.0)])
def test_beta_nonincreasing(beta: BetaFn) -> None:
    """ Every variant is nonincreasing with limit 0 on a log grid spanning 1e-3 to 1e9. """
    values = beta(log_grid)
    assert np.all(np.diff(values) <= 1e-15), f"failed at {beta!r}"
    assert values[-1] < 1e-3, f"failed at {beta!r}"

def test_shift() -> None:
    """ Shifting by c follows beta(s - c) above c and the capped value at 0 below. """
    beta = Poly(1.0, 1.0)
    assert shift(beta, 0.0) is beta
    shifted = shift(beta, 1.0)
    assert float(shifted(9.0)) == 0.125
    assert float(shifted(0.5)) == 0.25
    assert shifted.at_zero() == 0.25
    with pytest.raises(ConfigurationError):
        Shifted(beta, -1.0)

def test_kstar_poly_exact() -> None:
    """ For beta(s) = 1/s, K*(w) = w^2/4 at every tabulated node. """
    kstar = legendre_kstar(Poly(1.0, 1.0))
    w, values = kstar.w, kstar.values
    assert kstar.a == 0.25
    assert kstar.closed_form == (0.25, 2.0)
    assert np.all(np.abs(values/(w**2/4.0)-1.0) < 1e-4)
    assert abs(float(kstar(0.1))/0.0025-1.0) < 1e-4
    assert float(kstar(0.0)) == 0.0

@pytest.mark.parametrize("eta0, eta1", [(1.0, 1.0), (2.0, 3.0), (0.5, 0.5)])
def test_kstar_poly_closed_form(eta0: float, eta1: float) -> None:
    """ The polynomial closed form of the conjugate is matched within 1%. """
    beta = Poly(eta0, eta1)
    kstar = legendre_kstar(beta)
    c, k = beta.kstar_closed_form()
    w, values = kstar.w, kstar.values
    sel = w >= 1e-50
    assert np.all(np.abs(values[sel]/(c*w[sel]**k)-1.0) < 1e-2)

@pytest.mark.parametrize("beta", closed_form_betas)
def test_kstar_brute_force(beta: BetaFn) -> None:
    """ Tabulated conjugates agree with a dense brute-force conjugate within relative 1e-3. """
    kstar = legendre_kstar(beta)
    w, values = kstar.w, kstar.values
    sel = np.nonzero(w >= 1e-6)[0][::20]
    for i in sel:
        ref = _brute_conjugate(beta, float(w[i]))
        error_msg = f"failed at w = {w[i]:g} for {beta!r}"
        assert abs(values[i]/ref-1.0) < 1e-3, error_msg

@pytest.mark.parametrize("beta", closed_form_betas)
def test_kstar_invariants(beta: BetaFn) -> None:
    """ K*(w) <= w, K* increasing and convex, K*(w)/w nondecreasing. """
    kstar = legendre_kstar(beta)
    w, values = kstar.w, kstar.values
    assert np.all(values <= w)
    assert np.all(np.diff(values) > 0.0)
    ratio = values/w
    assert np.all(np.diff(ratio) >= -1e-9*ratio[1:])
    # convexity on consecutive triples
    lam = (w[1:-1]-w[:-2])/(w[2:]-w[:-2])
    chord = (1.0-lam)*values[:-2]+lam*values[2:]
    assert np.all(values[1:-1] <= chord*(1.0+1e-8))

def test_kstar_stretched_lower_bound() -> None:
    """ For a stretched exponential, K*(w) >= c w log(1/w)^(-1/eta2) with c bounded away from 0. """
    kstar = legendre_kstar(StretchedExp(1.0, 1.0, 0.5))
    w, values = kstar.w, kstar.values
    sel = w < 1e-10
    ratio = values[sel]/(w[sel]*np.log(1.0/w[sel])**-2.0)
    assert np.min(ratio) > 0.1

def test_rate_function_exact() -> None:
    """ For K*(w) = w^2/4 and a = 1/4, F(z) = 4(1/z - 4) and its inverse is 4/(t + 16). """
    F = rate_function(legendre_kstar(Poly(1.0, 1.0)))
    t = np.concatenate([[0.0], np.geomspace(1e-3, 1e4, 200)])
    assert np.all(np.abs(F.inverse(t)/(4.0/(t+16.0))-1.0) < 1e-4)
    z = np.geomspace(1e-6, 0.2, 50)
    assert np.all(np.abs(F(z)/(4.0*(1.0/z-4.0))-1.0) < 1e-4)
    assert float(F(0.25)) == 0.0

@pytest.mark.parametrize("beta", closed_form_betas)
def test_rate_function_round_trip(beta: BetaFn) -> None:
    """ F(F^-1(t)) = t within relative 1e-6 on the tabulated range; F^-1 is nonincreasing. """
    F = rate_function(legendre_kstar(beta))
    t = np.geomspace(1e-2, min(F.t_max, 1e12), 300)
    inv = F.inverse(t)
    assert np.all(np.diff(inv) <= 0.0)
    assert np.all(np.abs(F(inv)/t-1.0) < 1e-6)

@pytest.mark.parametrize("eta1", [1.0, 2.0])
def test_rate_function_poly_bound(eta1: float) -> None:
    """ F^-1(t) <= eta0 (1 + eta1)^(1 + eta1) t^(-eta1) on [1, 1e4]. """
    F = rate_function(legendre_kstar(Poly(1.0, eta1)))
    t = np.geomspace(1.0, 1e4, 100)
    assert np.all(F.inverse(t) <= (1.0+eta1)**(1.0+eta1)*t**-eta1*(1.0+1e-9))

def test_rate_function_stretched() -> None:
    """ For a stretched exponential with eta2 = 1/2, -log F^-1(t) grows like t^(1/3). """
    F = rate_function(legendre_kstar(StretchedExp(1.0, 1.0, 0.5)))
    assert F.t_max > 1e7
    t = np.geomspace(1e5, 1e7, 40)
    fit = stats.linregress(np.log(t), np.log(-np.log(F.inverse(t))))
    assert abs(fit.slope/(1.0/3.0)-1.0) < 0.1

def test_shift_bound() -> None:
    """ The shifted conjugate bound for 1/s with c = 1 is 8/9; it is 1 for a zero shift. """
    beta = Poly(1.0, 1.0)
    assert abs(kstar_shift_bound(beta, 1.0)-8.0/9.0) < 1e-12
    assert kstar_shift_bound(beta, 0.0) == 1.0
    assert abs(beta_threshold(beta)-8.0) < 1e-10
    with pytest.raises(ShiftThresholdError):
        kstar_shift_bound(Poly(1.0, 1e-4), 1.0)

@pytest.mark.parametrize("eta1, c", [(1.0, 1.0), (2.0, 2.0)])
def test_shift_bound_inequality(eta1: float, c: float) -> None:
    """ The conjugate of the shifted function dominates the bound times the original conjugate on (0, 1/8). """
    beta = Poly(1.0, eta1)
    c_tilde = kstar_shift_bound(beta, c)
    kstar = legendre_kstar(beta, 0.125)
    kstar_shifted = legendre_kstar(shift(beta, c), 0.125)
    w = np.geomspace(1e-8, 0.12, 60)
    assert np.all(kstar_shifted(w) >= c_tilde*kstar(w)*(1.0-1e-6))

def test_chain_oracle() -> None:
    """ Chaining 1/s with itself at s = 4 matches a brute-force infimum over a dense split grid. """
    chained = chain(Poly(1.0, 1.0), Poly(1.0, 1.0), 0.0)
    s1 = np.geomspace(1e-6, 1e6, 10**6)
    brute = float(np.min(s1*(s1/4.0)+1.0/s1))
    assert abs(chained.at(4.0)/brute-1.0) < 1e-6
    assert abs(chained.at(4.0)-1.5*2.0**(-1.0/3.0)) < 1e-6

def test_chain_upper_bound() -> None:
    """ The chained value never exceeds the objective at an explicitly supplied split. """
    bx, bv = Poly(1.0, 1.0), Poly(2.0, 0.5)
    chained = chain(bx, bv, 0.5)
    for s in (1.0, 10.0, 1e3, 1e6):
        for s1 in (0.1, 1.0, 3.0, 100.0):
            error_msg = f"failed at s = {s}, s1 = {s1}"
            assert chained.at(s) <= chain_objective(bx, chained.shifted_v, s, s1)*(1.0+1e-9), error_msg
    values = chained.values
    assert np.all(np.diff(values) <= 0.0)

@pytest.mark.parametrize("q_half, slope", [(1.0, -1.0/3.0), (2.0, -0.5)])
def test_chain_slope(q_half: float, slope: float) -> None:
    """ Chaining s^(-p/2) with s^(-q/2) decays with slope -pq/(2(2+p+q)). """
    chained = chain(Poly(1.0, 1.0), Poly(1.0, q_half), 0.0)
    s = np.geomspace(1e4, 1e12, 20)
    fit = stats.linregress(np.log(s), np.log(chained(s)))
    assert abs(fit.slope/slope-1.0) < 0.05

def test_chain_degenerate() -> None:
    """ A vanishing velocity function leaves the spatial function at arbitrarily large splits. """
    chained = chain(Poly(1.0, 1.0), Scaled(Poly(1.0, 1.0), 1.0, 0.0), 0.0)
    assert chained.at(1.0) < 1e-250

def test_options() -> None:
    """ Options are set temporarily within the context manager and validated. """
    assert get_options()["a"] == 0.25
    with options(a=0.125):
        assert legendre_kstar(Poly(1.0, 1.0)).a == 0.125
    assert get_options()["a"] == 0.25
    with pytest.raises(ConfigurationError):
        set_options(a=0.5)
    set_options(u_per_decade=30)
    assert get_options()["u_per_decade"] == 30
    reset_options()
    assert get_options()["u_per_decade"] == 20

def test_appendix_a_beta() -> None:
    """ With C_PL = 1 and gamma = 0 the strong-confinement function is the velocity function itself. """
    beta = Poly(1.0, 1.0)
    b = beta_appendix_a(beta, 1.0, 0.0)
    assert np.allclose(b(log_grid), beta(log_grid))
    assert float(b(4.0)) == 0.25
    with pytest.raises(ConfigurationError):
        beta_appendix_a(beta, 0.0, 1.0)

def test_weighted_tails_log_closed_form() -> None:
    """ For <x>^-3 and W = <x>, the tail mass of {A W^2 + B >= s} is 1 - sqrt(1 - A/(s-B)). """
    model = make_benchmark("log", 2.0, "gaussian")
    scale = 2.0
    b = beta_weighted(model.mu, model.weight, scale)
    assert b.at(0.5*scale) == pytest.approx(1.0)
    tail_x = beta_tail_x(model, 0.5, 1.0)
    for s in np.geomspace(1.5, 1e4, 12):
        error_msg = f"failed at s = {s}"
        expected = 1.0-math.sqrt(1.0-1.0/s)
        assert b.exact(s*scale) == pytest.approx(expected, rel=1e-5), error_msg
        assert tail_x.exact(s+1.0) == pytest.approx(expected, rel=1e-5), error_msg
        if s >= 1e2:
            assert b.at(s*scale) == pytest.approx(expected, rel=1e-2), error_msg
            assert tail_x.at(s+1.0) == pytest.approx(expected, rel=1e-2), error_msg

def test_tabulated_betas_bound_from_above() -> None:
    """ Between nodes, tabulated functions stay above their exact values and below the value at the left node. """
    model = make_benchmark("log", 2.0, "gaussian")
    coarse = Tail(model.mu, model.weight, 2.0, num_points=16)
    assert coarse.interp_slack >= 1.0
    s_nodes, beta_nodes = coarse.nodes
    mids = np.sqrt(s_nodes[:-1]*s_nodes[1:])
    for k, s in enumerate(mids):
        error_msg = f"failed at s = {s}"
        value, exact = coarse.at(float(s)), coarse.exact(float(s))
        if exact < 1e-200:
            continue
        assert value >= exact*(1.0-1e-12), error_msg
        assert value <= beta_nodes[k], error_msg
    dense = np.geomspace(s_nodes[0]*1.001, s_nodes[-1], 2000)
    values = coarse(dense)
    assert np.all(np.diff(values) <= 0.0)
    left = np.searchsorted(s_nodes, dense, side="right")-1
    assert np.all(values <= beta_nodes[left])
    chained = chain(Poly(1.0, 1.0), Poly(2.0, 0.5), 0.5)
    assert chained.interp_slack >= 1.0
    grid, tabulated = chained.grid, chained.values
    dense = np.geomspace(grid[0]*1.001, 1e12, 2000)
    values = chained(dense)
    assert np.all(np.diff(values) <= 0.0)
    left = np.clip(np.searchsorted(grid, dense, side="right")-1, 0, len(grid)-1)
    assert np.all(values <= tabulated[left])

def test_velocity_beta_gaussian() -> None:
    """ A velocity Poincaré inequality gives the indicator of s <= 1/C_P. """
    b = beta_velocity(make_benchmark("log", 2.0, "gaussian"))
    assert isinstance(b, Tail)
    assert b.at(0.5) == 1.0
    assert b.at(2.0) == 0.0

def test_beta_kin_log_gaussian_slope() -> None:
    """ Gaussian velocities and Log(p = 2): beta_kin decays with log-log slope -p/2. """
    b = _kinetic_beta("log", 2.0, "gaussian")
    assert isinstance(b, Tail)
    s1, s2 = b.threshold*1e6, b.threshold*1e10
    slope = math.log(b.exact(s2)/b.exact(s1))/math.log(s2/s1)
    assert abs(slope+1.0) < 0.05
    assert abs(b.at(s2)/b.exact(s2)-1.0) < 0.05

def test_beta_kin_subexp_gaussian() -> None:
    """ Gaussian velocities and SubExp(alpha = 1/2): log beta_kin decays like s^(alpha/(2(1-alpha))). """
    b = _kinetic_beta("subexp", 0.5, "gaussian")
    assert isinstance(b, Tail)
    s = b.threshold*np.geomspace(1e3, 1e5, 10)
    y = np.array([-math.log(b.exact(float(x))) for x in s])
    fit = stats.linregress(np.log(s), np.log(y))
    assert abs(fit.slope/0.5-1.0) < 0.1

def test_beta_kin_chained_slope() -> None:
    """ Log(q = 2) velocities and Log(p = 2): the chained beta_kin has slope -pq/(2(2+p+q)) = -1/3. """
    b = _kinetic_beta("log", 2.0, "log", 2.0)
    assert isinstance(b, Scaled)
    assert b.prefactor >= 1.0
    s1, s2 = 1e20, 1e40
    slope = math.log(b.at(s2)/b.at(s1))/math.log(s2/s1)
    assert abs(slope+1.0/3.0) < 0.05/3.0
