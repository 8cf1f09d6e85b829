r"""
    Weak Poincaré functions of a model: spatial tails, velocity functions derived from the velocity inequality,
    and the weak dissipation function :math:`\beta_{\mathrm{kin}}` of the kinetic semigroup.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy import optimize
from typing_validation import validate

from ..model import ConfigurationError, Measure, Model, QuadratureCfg, Weight
from ..constants import AveragingConstants, SpatialConstants
from ._beta import BetaFn, Chained, Poly, Scaled, StretchedExp, Tail, chain, chain_objective, shift

_log = logging.getLogger(__name__)

_BETA_CAP = 0.25
_CONSTRAINED_NODES = 200

def beta_weighted(measure: Measure, weight: Weight, scale: float, *, cfg: Optional[QuadratureCfg] = None) -> Tail:
    r"""
        The weak Poincaré function :math:`\beta(s) = m(W^2 \geq s/\mathrm{scale})` implied by a weighted Poincaré
        inequality with normalized constant :math:`P` and normalizer :math:`Z=\int W^{-2}dm`, where
        :math:`\mathrm{scale} = Z P`.
    """
    validate(scale, float)
    if cfg is None:
        return Tail(measure, weight, scale, 0.0)
    return Tail(measure, weight, scale, 0.0, cfg=cfg)

def beta_tail_x(model: Model, Z_W: float, C0_tau: float) -> Tail:
    r"""
        The spatial function :math:`\beta_x(s_1) = \mu(s_1 \leq 2Z_W C_{0,\tau}^2 W^2 + 1)`.
    """
    validate(model, Model)
    return Tail(model.mu, model.weight, 2.0*Z_W*C0_tau**2, 1.0, cfg=model.quadrature)

def beta_overdamped(model: Model, Z_W: float) -> Tail:
    r"""
        The weak Poincaré function of :math:`\mu` implied by the spatial weighted Poincaré inequality.
    """
    validate(model, Model)
    return beta_weighted(model.mu, model.weight, Z_W*model.weight.P, cfg=model.quadrature)

def beta_velocity(model: Model) -> BetaFn:
    r"""
        The velocity weak Poincaré function :math:`\beta_v` of the model.

        A Poincaré inequality with constant :math:`C_{P,\nu}` gives the indicator of :math:`s < 1/C_{P,\nu}`;
        otherwise the descriptor attached to the velocity inequality is used, with ``"weighted"``
        deriving :math:`\beta_v` from the velocity weight :math:`\mathcal{G}`.

        :raises ConfigurationError: if no usable velocity inequality is known
    """
    validate(model, Model)
    inequality = model.velocity
    cfg = model.quadrature
    if inequality.active == "poincare":
        assert inequality.poincare is not None
        return Tail(model.nu, Weight(0.0, 1.0), 1.0/inequality.poincare, 0.0, cfg=cfg)
    descriptor = inequality.beta
    if descriptor is None or descriptor.kind == "weighted":
        g = inequality.weight
        if g is None:
            raise ConfigurationError(f"Error building velocity beta for {model.kinetic!r}: no velocity weight is known.")
        nu = model.nu
        return beta_weighted(nu, g, g.normalizer(nu, cfg)*g.P, cfg=cfg)
    if descriptor.kind == "poly":
        eta0, eta1 = descriptor.params
        return Poly(eta0, eta1)
    eta0, eta1, eta2 = descriptor.params
    return StretchedExp(eta0, eta1, eta2)

def _constrained_chain(chained: Chained, s: float) -> float:
    # infimum over s1 in (1, s/c) of the chaining objective, capped at 1/4
    c = chained.c
    lo = 0.0
    hi = math.log(s/c) if c > 0.0 else math.log(1e300)
    if hi <= lo:
        return _BETA_CAP
    log_s1 = np.linspace(lo, hi, _CONSTRAINED_NODES)
    s1 = np.exp(log_s1)
    values = s1*chained.shifted_v(s/s1)+chained.beta_x(s1)
    j = int(np.argmin(values))
    best = float(values[j])
    a, b = float(log_s1[max(j-1, 0)]), float(log_s1[min(j+1, len(log_s1)-1)])
    res = optimize.minimize_scalar(lambda l: chain_objective(chained.beta_x, chained.shifted_v, s, math.exp(l)),
                                   bounds=(a, b), method="bounded", options={"xatol": 1e-9})
    return min(best, float(res.fun), _BETA_CAP)

def chain_constant(chained: Chained) -> Tuple[float, float]:
    r"""
        The threshold :math:`M` and the constant :math:`\bar C` relating the constrained chaining infimum
        (over splits with :math:`s_1\geq 1` and :math:`s_2\geq c`) to the unconstrained one.

        :math:`M` is the smallest grid point beyond which every unconstrained minimiser is admissible;
        :math:`\bar C = \max\{1, \max_{s\leq M} \tilde\beta(s)/\bar\beta(s)\}` on the grid.
    """
    validate(chained, Chained)
    grid = chained.grid
    s1 = chained.minimizers
    s2 = grid/s1
    admissible = (s1 >= 1.0) & (s2 >= chained.c)
    bad = np.nonzero(~admissible)[0]
    m_idx = 0 if len(bad) == 0 else min(int(bad[-1])+1, len(grid)-1)
    values = chained.values
    c_bar = 1.0
    for k in range(m_idx+1):
        c_bar = max(c_bar, _constrained_chain(chained, float(grid[k]))/float(values[k]))
    _log.debug("Chaining threshold M = %g, constant C_bar = %g", grid[m_idx], c_bar)
    return float(grid[m_idx]), c_bar

def beta_kin(model: Model, spatial: SpatialConstants, averaging: AveragingConstants, gamma: float) -> BetaFn:
    r"""
        The weak dissipation function :math:`\beta_{\mathrm{kin}}` of the kinetic semigroup, with

        .. math::

            \mathcal{H}_\tau \leq s\,\mathcal{D}_\tau + \beta_{\mathrm{kin}}(s)\,\Phi(h_0).

        With a velocity Poincaré inequality, :math:`\beta_{\mathrm{kin}}(s) = \mu(s\leq \tilde C W^2 + 1/(2\gamma C_{P,\nu}))`,
        :math:`\tilde C = Z_W(C_{0,\tau}^2/(\gamma C_{P,\nu}) + C_{1,\tau}^2\gamma)`.
        Otherwise :math:`\beta_{\mathrm{kin}}(s) = \bar C\bar\beta(2\gamma s)`, where :math:`\bar\beta` chains
        :func:`beta_tail_x` with :math:`\beta_v` shifted by :math:`\gamma^2C_{1,\tau}^2/C_{0,\tau}^2`.

        :raises ConfigurationError: if no velocity inequality is known
    """
    validate(model, Model)
    validate(gamma, float)
    if not 0.0 < gamma < math.inf:
        raise ConfigurationError(f"Error building kinetic beta: gamma must be positive and finite (found {gamma!r}).")
    inequality = model.velocity
    c0t, c1t = averaging.C0_tau, averaging.C1_tau
    if inequality.active == "poincare":
        assert inequality.poincare is not None
        c_p = inequality.poincare
        c_tilde = spatial.Z_W*(c0t**2/(gamma*c_p)+c1t**2*gamma)
        return Tail(model.mu, model.weight, c_tilde, 1.0/(2.0*gamma*c_p), cfg=model.quadrature)
    beta_x = beta_tail_x(model, spatial.Z_W, c0t)
    beta_v = beta_velocity(model)
    c = gamma**2*c1t**2/c0t**2
    chained = chain(beta_x, beta_v, c)
    _, c_bar = chain_constant(chained)
    return Scaled(chained, 2.0*gamma, c_bar)

def beta_appendix_a(beta_v: BetaFn, C_PL: float, gamma: float) -> BetaFn:
    r"""
        The weak dissipation function for a strongly confining potential:
        :math:`\beta_{\mathrm{kin}}(s) = C_{PL}\,\beta_v(s/C_{PL} - \gamma/2)`.

        >>> b = Poly(1.0, 1.0)
        >>> float(beta_appendix_a(b, 1.0, 0.0)(4.0))
        0.25
    """
    validate(beta_v, BetaFn)
    validate(C_PL, float)
    validate(gamma, float)
    if not 0.0 < C_PL < math.inf:
        raise ConfigurationError(f"Error building kinetic beta: C_PL must be positive and finite (found {C_PL!r}).")
    if not 0.0 <= gamma < math.inf:
        raise ConfigurationError(f"Error building kinetic beta: gamma must be non-negative (found {gamma!r}).")
    return Scaled(shift(beta_v, gamma/2.0), 1.0/C_PL, C_PL)

__all__ = ("beta_weighted", "beta_tail_x", "beta_overdamped", "beta_velocity", "chain_constant", "beta_kin",
           "beta_appendix_a")
