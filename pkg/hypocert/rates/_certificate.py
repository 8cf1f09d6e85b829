r"""
    Rate certificates: machine-evaluable envelopes :math:`\mathsf{F}` with
    :math:`\|h(t)\|^2_{L^2(\Theta)} \leq N\,\mathsf{F}(t)` for a normalizer :math:`N`.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

import logging
import math
from types import MappingProxyType
from typing import Any, Callable, Dict, Mapping, Optional, Sequence, Tuple
from typing_extensions import Literal

import numpy as np
import numpy.typing as npt
from typing_validation import validate

from ..model import ConfigurationError, FloatArray, Model
from ..constants import (AveragingConstants, SpatialConstants, WeightedCase, WeightedRateConstants,
                         compute_averaging_constants, compute_spatial_constants, compute_theorem1_constants,
                         compute_velocity_moments)
from ..weakpi import (BetaFn, RateFunction, beta_appendix_a, beta_kin, beta_overdamped, beta_velocity,
                      get_options, legendre_kstar, rate_function)
from ._exponents import ExponentClass, model_exponent, overdamped_exponent

_log = logging.getLogger(__name__)

Regime = Literal["thm1-case-i", "thm1-case-ii", "thm3-weakpi", "appendixA", "overdamped", "min"]
r"""
    How a certificate was obtained: the algebraic envelopes from weighted Poincaré inequalities (two cases),
    the weak Poincaré envelope, its strongly confining variant, the overdamped comparison, or a pointwise minimum.
"""

NormalizerKind = Literal["h_inf_sq", "oscillation"]
r"""
    What the envelope multiplies: :math:`\|h_0\|_\infty^2` (an upper bound on :math:`\|h_0\|^2`) or :math:`\Phi(h_0)`.
"""

Envelope = Callable[[FloatArray], FloatArray]

class RateCertificate:
    r"""
        A certified decay envelope.

        :meth:`envelope` is the envelope as stated; :meth:`envelope_alt` differs only on :math:`t\leq\tau`
        for weak Poincaré envelopes, where it uses :math:`a` in place of :math:`\tau`.
    """

    _regime: Regime
    _envelope: Envelope
    _envelope_alt: Envelope
    _normalizer_kind: NormalizerKind
    _normalizer: float
    _exponent: Optional[ExponentClass]
    _tau: float
    _constants: Mapping[str, float]
    _scenario_id: Optional[str]

    def __new__(cls, regime: Regime, envelope: Envelope, normalizer_kind: NormalizerKind, normalizer: float, *,
                tau: float = 0.0, exponent: Optional[ExponentClass] = None, envelope_alt: Optional[Envelope] = None,
                constants: Optional[Mapping[str, float]] = None, scenario_id: Optional[str] = None) -> RateCertificate:
        # pylint: disable = too-many-arguments
        validate(regime, Regime)
        validate(normalizer_kind, NormalizerKind)
        validate(normalizer, float)
        validate(exponent, Optional[ExponentClass])
        validate(scenario_id, Optional[str])
        if not 0.0 <= normalizer < math.inf:
            raise ConfigurationError(f"Error constructing certificate: normalizer must be finite and non-negative "
                                     f"(found {normalizer!r}).")
        instance = object.__new__(cls)
        instance._regime = regime
        instance._envelope = envelope
        instance._envelope_alt = envelope if envelope_alt is None else envelope_alt
        instance._normalizer_kind = normalizer_kind
        instance._normalizer = normalizer
        instance._exponent = exponent
        instance._tau = float(tau)
        instance._constants = MappingProxyType(dict(constants or {}))
        instance._scenario_id = scenario_id
        return instance

    @property
    def regime(self) -> Regime:
        r""" How the certificate was obtained. """
        return self._regime

    @property
    def normalizer_kind(self) -> NormalizerKind:
        r""" What the envelope multiplies. """
        return self._normalizer_kind

    @property
    def normalizer(self) -> float:
        r""" Value of the normalizer. """
        return self._normalizer

    @property
    def exponent(self) -> Optional[ExponentClass]:
        r""" Symbolic decay class, when known. """
        return self._exponent

    @property
    def tau(self) -> float:
        r""" Averaging window :math:`\tau`. """
        return self._tau

    @property
    def constants(self) -> Mapping[str, float]:
        r""" The constants the envelope was built from, keyed by symbol name. """
        return self._constants

    @property
    def scenario_id(self) -> Optional[str]:
        r""" Identifier of the scenario, once attached. """
        return self._scenario_id

    def envelope(self, t: npt.ArrayLike) -> FloatArray:
        r""" The envelope :math:`\mathsf{F}(t)`. """
        return self._envelope(np.asarray(t, dtype=np.float64))

    def envelope_alt(self, t: npt.ArrayLike) -> FloatArray:
        r""" The alternative envelope, see the class docstring. """
        return self._envelope_alt(np.asarray(t, dtype=np.float64))

    def bound(self, t: npt.ArrayLike) -> FloatArray:
        r""" The bound :math:`N\,\mathsf{F}(t)` on :math:`\|h(t)\|^2`. """
        return self._normalizer*self.envelope(t)

    def with_scenario_id(self, scenario_id: str) -> RateCertificate:
        r""" Returns a copy carrying the given scenario identifier. """
        return RateCertificate(self._regime, self._envelope, self._normalizer_kind, self._normalizer,
                               tau=self._tau, exponent=self._exponent, envelope_alt=self._envelope_alt,
                               constants=self._constants, scenario_id=scenario_id)

    def tabulate(self, times: npt.ArrayLike) -> Dict[str, Any]:
        r""" JSON-friendly tabulation of both envelopes at the given times. """
        t = np.asarray(times, dtype=np.float64)
        return {
            "regime": self._regime,
            "tau": self._tau,
            "normalizer": {"kind": self._normalizer_kind, "value": self._normalizer},
            "exponent": None if self._exponent is None else {"kind": self._exponent.kind, "r": self._exponent.r,
                                                              "symbol": self._exponent.symbol},
            "t": [float(x) for x in t],
            "envelope": [float(x) for x in self.envelope(t)],
            "envelope_alt": [float(x) for x in self.envelope_alt(t)],
        }

    def __repr__(self) -> str:
        return (f"RateCertificate({self._regime!r}, normalizer={self._normalizer_kind}:{self._normalizer:g}, "
                f"exponent={self._exponent!r})")

def model_constants(model: Model, gamma: float, tau: float) -> Tuple[SpatialConstants, AveragingConstants]:
    r"""
        Spatial and averaging constants of a model for the given friction and window.

        :raises ConfigurationError: if the potential gradient is unbounded
    """
    validate(model, Model)
    if not math.isfinite(model.potential.lipschitz):
        raise ConfigurationError(f"Error computing constants: the gradient of {model.potential!r} is unbounded; "
                                 f"use the strongly confining certificate.")
    spatial = compute_spatial_constants(model, tau)
    moments = compute_velocity_moments(model.kinetic, model.quadrature)
    averaging = compute_averaging_constants(spatial, moments, model.potential.lipschitz)
    return spatial, averaging

def constants_record(spatial: SpatialConstants, averaging: Optional[AveragingConstants] = None,
                     theorem1: Optional[WeightedRateConstants] = None) -> Dict[str, float]:
    r""" Flattens constants into a mapping keyed by symbol name. """
    record = {"tau": spatial.tau, "Z_W": spatial.Z_W, "P_W": spatial.P_W, "R_W_tau": spatial.R_W_tau,
              "C0": spatial.C0, "C1": spatial.C1, "C_Lions": spatial.C_Lions, "theta_W": spatial.theta_W}
    if averaging is not None:
        record.update({"C0_tau": averaging.C0_tau, "C1_tau": averaging.C1_tau})
    if theorem1 is not None:
        record.update({k: v for k, v in (("C2", theorem1.C2), ("phi0", theorem1.phi0), ("H0", theorem1.H0),
                                         ("A1", theorem1.A1), ("A2", theorem1.A2), ("C3", theorem1.C3),
                                         ("B", theorem1.B)) if v is not None})
    return record

def certify_thm1(model: Model, spatial: SpatialConstants, averaging: AveragingConstants, gamma: float,
                 h_inf: float, case: WeightedCase, *, initial_energy: Optional[float] = None) -> RateCertificate:
    r"""
        Algebraic envelope from the weighted Poincaré inequalities:
        :math:`\|h(t)\|^2 \leq \mathcal{H}_\tau(t-\tau)` for :math:`t\geq\tau`, and :math:`\|h(t)\|^2\leq\|h_0\|_\infty^2` before.
        The envelope is normalized by :math:`\|h_0\|_\infty^2`.

        :raises ConfigurationError: if the case does not match the active velocity inequality
    """
    # pylint: disable = too-many-arguments
    validate(case, WeightedCase)
    active = model.velocity.active
    expected = "poincare" if case == "i" else "weighted"
    if active != expected:
        raise ConfigurationError(f"Error certifying case ({case}): the active velocity inequality is {active!r}, "
                                 f"expected {expected!r}.")
    consts = compute_theorem1_constants(model, spatial, averaging, gamma, h_inf, case, initial_energy=initial_energy)
    tau = spatial.tau
    norm = h_inf**2
    bound = np.vectorize(consts.energy_bound, otypes=[np.float64])
    def envelope(t: FloatArray) -> FloatArray:
        shifted = np.maximum(t-tau, 0.0)
        return np.where(t >= tau, np.minimum(bound(shifted)/norm, 1.0), 1.0)
    regime: Regime = "thm1-case-i" if case == "i" else "thm1-case-ii"
    return RateCertificate(regime, envelope, "h_inf_sq", norm, tau=tau,
                           exponent=ExponentClass("algebraic", consts.exponent),
                           constants=constants_record(spatial, averaging, consts))

def _weakpi_envelopes(rate: RateFunction, tau: float, r0: Optional[float]) -> Tuple[Envelope, Envelope]:
    offset = 0.0
    if r0 is not None:
        if not 0.0 < r0 <= rate.a:
            raise ConfigurationError(f"Error certifying: initial ratio {r0!r} must lie in (0, {rate.a!r}].")
        offset = float(rate(r0))
    a = rate.a
    def envelope(t: FloatArray) -> FloatArray:
        if tau == 0.0:
            return rate.inverse(offset+np.maximum(t, 0.0))
        return np.where(t > tau, rate.inverse(offset+t-tau), tau)
    def envelope_alt(t: FloatArray) -> FloatArray:
        return np.where(t > tau, rate.inverse(offset+t-tau), rate.inverse(offset) if r0 is not None else a)
    return envelope, envelope_alt

def certify_thm3(beta: BetaFn, tau: float, *, a: Optional[float] = None, oscillation: float = 1.0,
                 r0: Optional[float] = None, model: Optional[Model] = None,
                 constants: Optional[Mapping[str, float]] = None) -> RateCertificate:
    r"""
        Weak Poincaré envelope :math:`\mathsf{F}(t) = F_a^{-1}(t-\tau)` for :math:`t>\tau` and :math:`\tau` before,
        normalized by :math:`\Phi(h_0)`. With an initial ratio :math:`r_0=\|h_0\|^2/\Phi(h_0)\leq a`,
        :math:`F_a^{-1}(F_a(r_0)+t-\tau)` is used instead.

        >>> from hypocert.weakpi import Poly
        >>> cert = certify_thm3(Poly(1.0, 1.0), 0.0)
        >>> abs(float(cert.envelope(84.0))/0.04-1.0) < 1e-4
        True

        :raises InvalidKStarError: if the conjugate of ``beta`` is invalid
    """
    # pylint: disable = too-many-arguments
    validate(beta, BetaFn)
    validate(tau, float)
    validate(oscillation, float)
    if not 0.0 <= tau < math.inf:
        raise ConfigurationError(f"Error certifying: tau must be non-negative and finite (found {tau!r}).")
    if a is None:
        a = float(get_options()["a"])
    rate = rate_function(legendre_kstar(beta, a), a)
    envelope, envelope_alt = _weakpi_envelopes(rate, tau, r0)
    exponent = model_exponent(model) if model is not None else None
    return RateCertificate("thm3-weakpi", envelope, "oscillation", oscillation, tau=tau, exponent=exponent,
                           envelope_alt=envelope_alt, constants=constants)

def certify_appendixA(model: Model, C_PL: Optional[float], gamma: float, tau: float, *,
                      beta_v: Optional[BetaFn] = None, a: Optional[float] = None, oscillation: float = 1.0,
                      r0: Optional[float] = None) -> RateCertificate:
    r"""
        Weak Poincaré envelope for strongly confining potentials, with
        :math:`\beta_{\mathrm{kin}}(s) = C_{PL}\,\beta_v(s/C_{PL}-\gamma/2)`.

        :raises ConfigurationError: if ``C_PL`` is missing or the potential is not strongly confining
    """
    # pylint: disable = too-many-arguments
    validate(model, Model)
    if C_PL is None:
        raise ConfigurationError("Error certifying strongly confining case: the constant C_PL must be supplied.")
    if not model.potential.strongly_confining:
        raise ConfigurationError(f"Error certifying strongly confining case: {model.potential!r} is not strongly confining.")
    if beta_v is None:
        beta_v = beta_velocity(model)
    beta = beta_appendix_a(beta_v, float(C_PL), gamma)
    cert = certify_thm3(beta, tau, a=a, oscillation=oscillation, r0=r0, model=model,
                        constants={"C_PL": float(C_PL), "gamma": gamma})
    return RateCertificate("appendixA", cert.envelope, "oscillation", oscillation, tau=tau,
                           exponent=cert.exponent, envelope_alt=cert.envelope_alt, constants=cert.constants)

def certify_overdamped(model: Model, *, a: Optional[float] = None, oscillation: float = 1.0) -> RateCertificate:
    r"""
        Envelope :math:`F_a^{-1}(2t)` of the overdamped dynamics with the same potential,
        from the weak Poincaré function implied by the spatial weighted Poincaré inequality.
    """
    validate(model, Model)
    if a is None:
        a = float(get_options()["a"])
    z_w = model.weight.normalizer(model.mu, model.quadrature)
    rate = rate_function(legendre_kstar(beta_overdamped(model, z_w), a), a)
    def envelope(t: FloatArray) -> FloatArray:
        return rate.inverse(2.0*np.maximum(t, 0.0))
    pot = model.potential
    return RateCertificate("overdamped", envelope, "oscillation", oscillation,
                           exponent=overdamped_exponent(pot.kind, pot.param),  # type: ignore[arg-type]
                           constants={"Z_W": z_w, "P_W": model.weight.P})

def certify(model: Model, gamma: float, tau: float, *, regime: Optional[Regime] = None, h_inf: float = 1.0,
            oscillation: Optional[float] = None, C_PL: Optional[float] = None, a: Optional[float] = None,
            r0: Optional[float] = None) -> RateCertificate:
    r"""
        Computes the constants of a model and the certificate of the requested regime.

        Without a regime, strongly confining potentials with unbounded gradients go through :func:`certify_appendixA`
        and all other models through the weak Poincaré envelope. The oscillation defaults to :math:`4\|h_0\|_\infty^2`.
    """
    # pylint: disable = too-many-arguments
    validate(model, Model)
    validate(regime, Optional[Regime])
    if oscillation is None:
        oscillation = 4.0*h_inf**2
    if regime is None:
        regime = "appendixA" if not math.isfinite(model.potential.lipschitz) else "thm3-weakpi"
    if regime == "appendixA":
        return certify_appendixA(model, C_PL, gamma, tau, a=a, oscillation=oscillation, r0=r0)
    if regime == "overdamped":
        return certify_overdamped(model, a=a, oscillation=oscillation)
    if regime == "min":
        raise ConfigurationError("Error certifying: the 'min' regime is built with pointwise_min.")
    spatial, averaging = model_constants(model, gamma, tau)
    if regime == "thm1-case-i":
        return certify_thm1(model, spatial, averaging, gamma, h_inf, "i")
    if regime == "thm1-case-ii":
        return certify_thm1(model, spatial, averaging, gamma, h_inf, "ii")
    beta = beta_kin(model, spatial, averaging, gamma)
    return certify_thm3(beta, tau, a=a, oscillation=oscillation, r0=r0, model=model,
                        constants=constants_record(spatial, averaging))

def pointwise_min(certificates: Sequence[RateCertificate], oscillation: Optional[float] = None) -> RateCertificate:
    r"""
        Combines certificates into the pointwise minimum of their bounds, expressed on the common normalizer
        :math:`\Phi(h_0)` (taken from the first oscillation-normalized certificate if not given).

        :raises ConfigurationError: if no certificate is given or no oscillation is known
    """
    certs = tuple(certificates)
    if not certs:
        raise ConfigurationError("Error combining certificates: no certificate given.")
    if oscillation is None:
        found = [c.normalizer for c in certs if c.normalizer_kind == "oscillation"]
        if not found:
            raise ConfigurationError("Error combining certificates: supply the oscillation of the initial datum.")
        oscillation = found[0]
    if not oscillation > 0.0:
        raise ConfigurationError(f"Error combining certificates: oscillation must be positive (found {oscillation!r}).")
    norm = float(oscillation)
    def envelope(t: FloatArray) -> FloatArray:
        return np.min(np.stack([c.bound(t) for c in certs]), axis=0)/norm
    def envelope_alt(t: FloatArray) -> FloatArray:
        return np.min(np.stack([c.normalizer*c.envelope_alt(t) for c in certs]), axis=0)/norm
    exponents = [c.exponent for c in certs if c.exponent is not None]
    exponent = max(exponents, key=lambda e: e.strength()) if exponents else None
    merged: Dict[str, float] = {}
    for c in certs:
        merged.update(c.constants)
    return RateCertificate("min", envelope, "oscillation", norm, tau=min(c.tau for c in certs), exponent=exponent,
                           envelope_alt=envelope_alt, constants=merged, scenario_id=certs[0].scenario_id)

def optimize_tau(model: Model, gamma: float, horizon: float, *, taus: Optional[Sequence[float]] = None,
                 regime: Optional[Regime] = None, h_inf: float = 1.0, C_PL: Optional[float] = None,
                 a: Optional[float] = None) -> Tuple[float, float]:
    r"""
        Grid search for the window :math:`\tau` minimising the certified bound at the given horizon.
        The default grid has 12 log-spaced points from 0.25 to 8.

        Returns the best :math:`\tau` and the bound there.
    """
    # pylint: disable = too-many-arguments
    validate(horizon, float)
    if not 0.0 < horizon < math.inf:
        raise ConfigurationError(f"Error optimising tau: horizon must be positive and finite (found {horizon!r}).")
    grid = np.geomspace(0.25, 8.0, 12) if taus is None else np.asarray(taus, dtype=np.float64)
    best_tau, best_value = math.nan, math.inf
    for tau in grid:
        cert = certify(model, gamma, float(tau), regime=regime, h_inf=h_inf, C_PL=C_PL, a=a)
        value = float(cert.bound(horizon))
        _log.info("Bound at horizon %g with tau = %g: %g", horizon, tau, value)
        if value < best_value:
            best_tau, best_value = float(tau), value
    return best_tau, best_value

__all__ = ("Regime", "NormalizerKind", "Envelope", "RateCertificate", "model_constants", "constants_record",
           "certify_thm1", "certify_thm3", "certify_appendixA", "certify_overdamped", "certify", "pointwise_min",
           "optimize_tau")
