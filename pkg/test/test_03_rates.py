"""
    Tests on rate certificates and the symbolic classification of decay rates.
"""

import math
from typing import Optional

import numpy as np
import pytest

from hypocert.model import ConfigurationError, make_benchmark
from hypocert.weakpi import Poly
from hypocert.rates import (ExponentClass, RateCertificate, certify, certify_appendixA, certify_overdamped,
                            certify_thm3, fit_exponent, model_constants, optimize_tau, overdamped_exponent,
                            pointwise_min, table1_exponent)

t_grid = np.geomspace(1e-2, 1e8, 100)

table1_cells = [
    ("subexp", 1.5, "gaussian", None, "exponential", None),
    ("subexp", 1.5, "subexp", 0.5, "stretched-exp", 1.0/3.0),
    ("subexp", 1.5, "log", 2.0, "algebraic", 1.0),
    ("subexp", 0.5, "gaussian", None, "stretched-exp", 1.0/3.0),
    ("subexp", 0.5, "subexp", 0.5, "stretched-exp", 0.2),
    ("subexp", 0.5, "log", 2.0, "algebraic-minus", 1.0),
    ("log", 2.0, "gaussian", None, "algebraic", 1.0),
    ("log", 2.0, "subexp", 0.5, "algebraic-minus", 1.0),
    ("log", 2.0, "log", 2.0, "algebraic", 1.0/3.0),
]

@pytest.mark.parametrize("pk, pp, kk, kp, kind, r", table1_cells)
def test_table1_cells(pk: str, pp: float, kk: str, kp: Optional[float], kind: str, r: Optional[float]) -> None:
    """ The nine symbolic cells of the rate table. """
    cls = table1_exponent(pk, pp, kk, kp) # type: ignore[arg-type]
    assert cls.kind == kind
    if r is None:
        assert cls.r is None
    else:
        assert cls.r is not None and abs(cls.r-r) < 1e-15

def test_table1_errors() -> None:
    """ Non-benchmark kinds and missing kinetic parameters are rejected. """
    with pytest.raises(TypeError):
        table1_exponent("quartic", 1.0, "gaussian") # type: ignore[arg-type]
    with pytest.raises(ConfigurationError):
        table1_exponent("log", 2.0, "log")

def test_overdamped_exponent() -> None:
    """ Overdamped classes: exponential, stretched alpha/(2-alpha), algebraic p/2. """
    assert overdamped_exponent("subexp", 1.0).kind == "exponential"
    assert overdamped_exponent("subexp", 0.5) == ExponentClass("stretched-exp", 1.0/3.0)
    assert overdamped_exponent("log", 4.0) == ExponentClass("algebraic", 2.0)

def test_exponent_class() -> None:
    """ Symbols, strengths and validation of exponent classes. """
    assert ExponentClass("algebraic", 0.5).symbol == "t^-0.5"
    assert ExponentClass("algebraic-minus", 1.0).symbol == "t^-1-"
    assert ExponentClass("stretched-exp", 0.2).symbol == "exp(-c t^0.2)"
    assert ExponentClass("exponential").symbol == "exp(-lambda t)"
    assert ExponentClass("exponential").strength() > ExponentClass("stretched-exp", 0.9).strength()
    assert ExponentClass("algebraic", 2.0).strength() > ExponentClass("algebraic", 1.0).strength()
    with pytest.raises(ConfigurationError):
        ExponentClass("algebraic")
    with pytest.raises(ConfigurationError):
        ExponentClass("algebraic", -1.0)

def test_fit_exponent() -> None:
    """ Exponent fits recover the exponents of exact envelopes. """
    t = np.geomspace(1.0, 1e4, 50)
    assert abs(fit_exponent(t, t**-1.5, "algebraic")-1.5) < 1e-10
    assert abs(fit_exponent(t, np.exp(-2.0*t**0.4), "stretched-exp")-0.4) < 1e-10
    t_lin = np.linspace(1.0, 100.0, 50)
    assert abs(fit_exponent(t_lin, np.exp(-3.0*t_lin), "exponential")-3.0) < 1e-8
    with pytest.raises(ConfigurationError):
        fit_exponent(t[:2], t[:2]**-1.0, "algebraic")

def test_thm3_exact_pipeline() -> None:
    """ beta = 1/s, a = 1/4, tau = 0: the envelope is 4/(t + 16). """
    cert = certify_thm3(Poly(1.0, 1.0), 0.0)
    t = np.concatenate([[0.0], np.geomspace(1e-3, 1e4, 100)])
    assert np.all(np.abs(cert.envelope(t)/(4.0/(t+16.0))-1.0) < 1e-4)
    assert abs(float(cert.envelope(0.0))-0.25) < 1e-12
    assert cert.normalizer_kind == "oscillation"
    assert cert.regime == "thm3-weakpi"

def test_thm3_literal_window() -> None:
    """ Before tau the envelope is tau, the alternative envelope is a; after tau both shift the rate by tau. """
    cert = certify_thm3(Poly(1.0, 1.0), 1.0)
    assert float(cert.envelope(0.5)) == 1.0
    assert float(cert.envelope_alt(0.5)) == 0.25
    assert abs(float(cert.envelope(5.0))/0.2-1.0) < 1e-4
    assert float(cert.envelope_alt(5.0)) == float(cert.envelope(5.0))

def test_thm3_initial_ratio() -> None:
    """ An initial ratio r0 gives F^-1(F(r0) + t), below the plain envelope. """
    plain = certify_thm3(Poly(1.0, 1.0), 0.0)
    sharp = certify_thm3(Poly(1.0, 1.0), 0.0, r0=0.1)
    t = np.geomspace(1e-2, 1e4, 50)
    assert np.all(np.abs(sharp.envelope(t)/(4.0/(t+40.0))-1.0) < 1e-3)
    assert np.all(sharp.envelope(t) <= plain.envelope(t))
    with pytest.raises(ConfigurationError):
        certify_thm3(Poly(1.0, 1.0), 0.0, r0=0.5)

def test_certify_log_gaussian() -> None:
    """ Log(p = 2) + Gaussian: weak Poincaré envelope, nonincreasing to 0, class t^-1, constants recorded. """
    model = make_benchmark("log", 2.0, "gaussian")
    cert = certify(model, 1.0, 1.0)
    assert cert.regime == "thm3-weakpi"
    assert cert.exponent == ExponentClass("algebraic", 1.0)
    assert cert.normalizer == 4.0
    for key in ("Z_W", "P_W", "R_W_tau", "C0", "C1", "C_Lions", "C0_tau", "C1_tau"):
        assert key in cert.constants, f"failed at {key}"
    assert abs(cert.constants["P_W"]-2.0/(cert.constants["Z_W"]*2.0)) < 1e-12
    env = cert.envelope(t_grid)
    assert np.all(np.diff(env) <= 0.0)
    assert float(cert.envelope(0.5)) == 1.0
    t = np.geomspace(1e6, 1e12, 60)
    assert abs(fit_exponent(t, cert.envelope(t), "algebraic")-1.0) < 0.1

def test_certify_subexp_gaussian() -> None:
    """ SubExp(alpha = 1/2) + Gaussian: stretched class alpha/(2 - alpha), visible in the envelope at large times. """
    model = make_benchmark("subexp", 0.5, "gaussian")
    cert = certify(model, 1.0, 1.0)
    assert cert.exponent == ExponentClass("stretched-exp", 1.0/3.0)
    t = np.geomspace(1.0, 1e40, 800)
    env = cert.envelope(t)
    # logarithmic corrections decay slowly: fit where -log F runs from 25 to 130 decades
    mask = (env < 1e-25) & (env > 1e-130)
    assert np.count_nonzero(mask) >= 3
    assert abs(fit_exponent(t[mask], env[mask], "stretched-exp", decades=40.0)/(1.0/3.0)-1.0) < 0.2

@pytest.mark.parametrize("p, q", [(2.0, 2.0), (2.0, 4.0), (4.0, 4.0)])
def test_certify_chained_slope(p: float, q: float) -> None:
    """ Log(p) + Log(q): the certified envelope decays with exponent pq/(4 + 2p + 2q). """
    model = make_benchmark("log", p, "log", q)
    cert = certify(model, 1.0, 1.0)
    r = p*q/(4.0+2.0*p+2.0*q)
    assert cert.exponent == ExponentClass("algebraic", r)
    t = np.geomspace(1e30, 1e40, 40)
    assert abs(fit_exponent(t, cert.envelope(t), "algebraic")/r-1.0) < 0.1
    assert np.all(np.diff(cert.envelope(t_grid)) <= 0.0)

def test_certify_thm1() -> None:
    """ Algebraic envelopes: normalized by the squared sup norm, starting at 1, with exponent sigma/2. """
    model = make_benchmark("log", 2.0, "gaussian")
    cert = certify(model, 1.0, 1.0, regime="thm1-case-i")
    assert cert.regime == "thm1-case-i"
    assert cert.normalizer_kind == "h_inf_sq"
    assert cert.exponent == ExponentClass("algebraic", 0.5)
    assert float(cert.envelope(0.0)) == 1.0
    env = cert.envelope(t_grid)
    assert np.all(np.diff(env) <= 0.0)
    assert float(cert.envelope(1e300)) < 1e-100
    with pytest.raises(ConfigurationError):
        certify(model, 1.0, 1.0, regime="thm1-case-ii")

def test_certify_thm1_case_ii() -> None:
    """ Weighted velocity inequality: case (ii) certificate with exponent sigma delta/(2(sigma + delta + 2)). """
    model = make_benchmark("log", 2.0, "subexp", 0.5)
    cert = certify(model, 1.0, 1.0, regime="thm1-case-ii")
    assert cert.exponent == ExponentClass("algebraic", 1.0*4.0/(2.0*7.0))
    assert np.all(np.diff(cert.envelope(t_grid)) <= 0.0)

def test_certify_appendix_a() -> None:
    """ Strongly confining potential with Gaussian velocities: exponential class and envelope. """
    model = make_benchmark("subexp", 1.5, "gaussian")
    with pytest.raises(ConfigurationError):
        certify(model, 1.0, 1.0)
    with pytest.raises(ConfigurationError):
        model_constants(model, 1.0, 1.0)
    cert = certify(model, 1.0, 1.0, C_PL=1.0)
    assert cert.regime == "appendixA"
    assert cert.exponent is not None and cert.exponent.kind == "exponential"
    t = np.geomspace(2.0, 100.0, 40)
    assert abs(fit_exponent(t, cert.envelope(t), "exponential")/(2.0/3.0)-1.0) < 1e-3
    with pytest.raises(ConfigurationError):
        certify_appendixA(make_benchmark("log", 2.0, "gaussian"), 1.0, 1.0, 1.0)

def test_appendix_a_degenerate() -> None:
    """ beta_v = 1/s, gamma = 0 and C_PL = 1 reproduce the plain weak Poincaré pipeline. """
    model = make_benchmark("subexp", 1.5, "gaussian")
    cert = certify_appendixA(model, 1.0, 0.0, 0.0, beta_v=Poly(1.0, 1.0))
    plain = certify_thm3(Poly(1.0, 1.0), 0.0)
    assert np.allclose(cert.envelope(t_grid), plain.envelope(t_grid), rtol=1e-12, atol=0.0)

def test_certify_overdamped() -> None:
    """ Overdamped comparison for Log(p = 2): class t^-1, starting at a, nonincreasing. """
    model = make_benchmark("log", 2.0, "gaussian")
    cert = certify_overdamped(model)
    assert cert.regime == "overdamped"
    assert cert.exponent == ExponentClass("algebraic", 1.0)
    assert abs(float(cert.envelope(0.0))-0.25) < 1e-12
    assert np.all(np.diff(cert.envelope(t_grid)) <= 0.0)
    assert certify(model, 1.0, 1.0, regime="overdamped").regime == "overdamped"

def test_certify_min_regime() -> None:
    """ The pointwise minimum is built with pointwise_min, not certify. """
    with pytest.raises(ConfigurationError):
        certify(make_benchmark("log", 2.0, "gaussian"), 1.0, 1.0, regime="min")

def test_pointwise_min() -> None:
    """ The combined bound is the pointwise minimum of the individual bounds. """
    model = make_benchmark("log", 2.0, "gaussian")
    thm1 = certify(model, 1.0, 1.0, regime="thm1-case-i")
    thm3 = certify(model, 1.0, 1.0)
    combined = pointwise_min([thm1, thm3])
    assert combined.regime == "min"
    assert combined.normalizer == 4.0
    assert combined.exponent == ExponentClass("algebraic", 1.0)
    bound = combined.bound(t_grid)
    assert np.all(bound <= thm1.bound(t_grid)*(1.0+1e-12))
    assert np.all(bound <= thm3.bound(t_grid)*(1.0+1e-12))
    assert np.allclose(bound, np.minimum(thm1.bound(t_grid), thm3.bound(t_grid)), rtol=1e-12, atol=0.0)
    with pytest.raises(ConfigurationError):
        pointwise_min([])
    with pytest.raises(ConfigurationError):
        pointwise_min([thm1])

def test_optimize_tau() -> None:
    """ The grid search returns the window with the smallest bound at the horizon. """
    model = make_benchmark("log", 2.0, "gaussian")
    taus = [0.5, 1.0, 2.0]
    best_tau, best_value = optimize_tau(model, 1.0, 100.0, taus=taus, regime="thm1-case-i")
    values = [float(certify(model, 1.0, tau, regime="thm1-case-i").bound(100.0)) for tau in taus]
    assert best_tau in taus
    assert best_value == min(values)
    with pytest.raises(ConfigurationError):
        optimize_tau(model, 1.0, -1.0)

def test_certificate_record() -> None:
    """ Certificates carry scenario identifiers and tabulate both envelopes. """
    cert = certify_thm3(Poly(1.0, 1.0), 1.0)
    tagged = cert.with_scenario_id("bafyexample")
    assert isinstance(tagged, RateCertificate)
    assert tagged.scenario_id == "bafyexample" and cert.scenario_id is None
    table = tagged.tabulate([0.5, 2.0])
    assert table["regime"] == "thm3-weakpi"
    assert table["envelope"][0] == 1.0 and table["envelope_alt"][0] == 0.25
    assert not math.isnan(table["envelope"][1])
    with pytest.raises(ConfigurationError):
        RateCertificate("thm3-weakpi", cert.envelope, "oscillation", -1.0)
