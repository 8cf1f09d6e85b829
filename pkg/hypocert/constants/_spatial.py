r"""
    Spatial constants: the weight normalizer, the remainder :math:`R_{W,\tau}`, the divergence-equation constants
    :math:`C_0, C_1` and the weighted Poincaré–Lions constant.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

from dataclasses import dataclass
import logging
import math
from typing import Optional, Tuple

from typing_validation import validate

from ..model import ConfigurationError, Model, QuadratureCfg

_log = logging.getLogger(__name__)

@dataclass(frozen=True)
class SpatialConstants:
    r"""
        Constants of the weighted Poincaré–Lions inequality on :math:`[0,\tau]\times\mathbb{R}^d`.
    """

    tau: float
    Z_W: float
    P_W: float
    R_W_tau: float
    C0: float
    C1: float
    C_Lions: float
    theta_W: float = 1.0

def compute_Zw(model: Model, cfg: Optional[QuadratureCfg] = None) -> float:
    r"""
        :math:`Z_W = \int W^{-2}d\mu`, equal to 1 for the identity weight.

        :raises QuadratureError: if the integral fails to converge
    """
    validate(model, Model)
    if cfg is None:
        cfg = model.quadrature
    return model.weight.normalizer(model.potential.measure(cfg), cfg)

def compute_Rwtau(P_W: float, tau: float) -> float:
    r"""
        :math:`R_{W,\tau} = 2\tau e^{-\tau/\sqrt{P_W}} / (\sqrt{P_W}(1-e^{-2\tau/\sqrt{P_W}})) = s/\sinh(s)`
        with :math:`s=\tau/\sqrt{P_W}`, evaluated without overflow.

        >>> round(compute_Rwtau(1.0, 1.0), 5)
        0.85092
    """
    if not P_W > 0 or not tau > 0:
        raise ConfigurationError(f"Error computing R_W_tau: P_W and tau must be positive (found {P_W!r}, {tau!r}).")
    s = tau/math.sqrt(P_W)
    if s < 1e-4:
        return 1.0-s*s/6.0
    return math.exp(math.log(2.0*s)-s-math.log(-math.expm1(-2.0*s)))

def compute_C0_C1(tau: float, P_W: float, Z_W: float, M: float, R_W_tau: float) -> Tuple[float, float]:
    r"""
        The constants of the divergence-equation estimates:

        .. math::

            C_0 = \sqrt{3}\max\Big\{\frac{\tau}{\pi}, \sqrt{\frac{40P_W}{1-R_{W,\tau}}}\Big\},

            C_1 = \sqrt{3}\max\Big\{\sqrt{2+4Z_W^{-1}+M\max(\tau^2/\pi^2,P_W)},
            \sqrt{\frac{53+36\,[Z_W^{-1}+MP_W+(1+2/(1-e^{-\tau/\sqrt{P_W}}))^2]}{1-R_{W,\tau}}}\Big\}.
    """
    if not R_W_tau < 1.0:
        raise ConfigurationError(f"Error computing C0, C1: R_W_tau must be below 1 (found {R_W_tau!r}).")
    sqrt3 = math.sqrt(3.0)
    c0 = sqrt3*max(tau/math.pi, math.sqrt(40.0*P_W/(1.0-R_W_tau)))
    first = math.sqrt(2.0+4.0/Z_W+M*max(tau**2/math.pi**2, P_W))
    boundary = (1.0+2.0/(-math.expm1(-tau/math.sqrt(P_W))))**2
    second = math.sqrt(1.0/(1.0-R_W_tau))*math.sqrt(53.0+36.0*(1.0/Z_W+M*P_W+boundary))
    c1 = sqrt3*max(first, second)
    return c0, c1

def compute_C_Lions(C0: float, C1: float, Z_W: float, theta_W: float) -> float:
    r"""
        :math:`C_{\mathrm{Lions}} = \sqrt{(1+2/Z_W)C_1^2 + (1+2\theta_W^2)C_0^2}`.

        >>> compute_C_Lions(0.0, 1.0, 2.0, 1.0) == 2.0**0.5
        True
    """
    return math.sqrt((1.0+2.0/Z_W)*C1**2+(1.0+2.0*theta_W**2)*C0**2)

def compute_spatial_constants(model: Model, tau: float, cfg: Optional[QuadratureCfg] = None) -> SpatialConstants:
    r"""
        Assembles :class:`SpatialConstants` for the model at the given :math:`\tau`.
    """
    validate(model, Model)
    validate(tau, float)
    if not 0.0 < tau < math.inf:
        raise ConfigurationError(f"Error computing spatial constants: tau must be positive and finite (found {tau!r}).")
    z_w = compute_Zw(model, cfg)
    p_w = model.weight.P
    r = compute_Rwtau(p_w, tau)
    c0, c1 = compute_C0_C1(tau, p_w, z_w, model.potential.hessian_bound, r)
    theta = model.weight.theta
    c_lions = compute_C_Lions(c0, c1, z_w, theta)
    _log.debug("Spatial constants at tau = %g: Z_W %g, P_W %g, R %g, C0 %g, C1 %g, C_Lions %g",
               tau, z_w, p_w, r, c0, c1, c_lions)
    return SpatialConstants(tau, z_w, p_w, r, c0, c1, c_lions, theta)

__all__ = ("SpatialConstants", "compute_Zw", "compute_Rwtau", "compute_C0_C1", "compute_C_Lions",
           "compute_spatial_constants")
