r"""
    Velocity moments of the kinetic energy and the constants of the space-time averaging lemma.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

from dataclasses import dataclass
import logging
import math
from typing import Optional

import numpy as np
from typing_validation import validate

from ..model import ConfigurationError, DEFAULT_QUADRATURE, FloatArray, Kinetic, QuadratureCfg, integrate
from ._spatial import SpatialConstants

_log = logging.getLogger(__name__)

@dataclass(frozen=True)
class VelocityMoments:
    r"""
        Moments of :math:`\nabla\psi` under :math:`\nu`, the covariance matrix
        :math:`\mathscr{M}=\int\nabla\psi\otimes\nabla\psi\,d\nu`,
        :math:`\mathcal{M}=\|\nabla\psi\|^2\mathscr{M}^{-1}` and the cross terms built from :math:`G=\nabla\psi/\|\nabla\psi\|`.
    """

    n2: float
    n4: float
    h2: float
    scrM: FloatArray
    rho_scrM: float
    calM: FloatArray
    rho_calM: float
    gH1: float
    cross1: float
    cross2: float

@dataclass(frozen=True)
class AveragingConstants:
    r"""
        The constants :math:`C_{0,\tau}, C_{1,\tau}` of the averaging lemma.
    """

    C0_tau: float
    C1_tau: float

def compute_velocity_moments(kinetic: Kinetic, cfg: Optional[QuadratureCfg] = None) -> VelocityMoments:
    r"""
        Computes :class:`VelocityMoments` by radial quadrature.

        For a radial kinetic energy :math:`\psi(v)=g(|v|)`, :math:`\mathscr{M} = (n_2/d)\,I`, with
        :math:`n_2=\int g'^2d\nu`, :math:`n_4=\int g'^4d\nu` and :math:`h_2=\int (g''^2+(d-1)(g'/r)^2)\,d\nu`.

        :raises ConfigurationError: if :math:`\mathscr{M}` is not positive definite
    """
    validate(kinetic, Kinetic)
    if cfg is None:
        cfg = DEFAULT_QUADRATURE
    nu = kinetic.measure(cfg)
    d = kinetic.dim
    def g1(v: float) -> float:
        return float(kinetic.grad(np.float64(v)))
    def hess_sq(v: float) -> float:
        radial, tangential = kinetic.hessian(np.float64(v))
        return float(radial)**2+(d-1)*float(tangential)**2
    n2 = integrate(lambda v: g1(v)**2, nu, cfg)
    n4 = integrate(lambda v: g1(v)**4, nu, cfg)
    h2 = integrate(hess_sq, nu, cfg)
    scr_m = (n2/d)*np.eye(d)
    eigenvalues = np.linalg.eigvalsh(scr_m)
    if not eigenvalues[0] > 0.0:
        raise ConfigurationError(f"Error computing velocity moments of {kinetic!r}: covariance of the kinetic gradient "
                                 f"is not positive definite (smallest eigenvalue {eigenvalues[0]!r}).")
    cal_m = n2*np.linalg.inv(scr_m)
    rho_scr_m = float(eigenvalues[-1])
    rho_cal_m = float(np.linalg.eigvalsh(cal_m)[-1])
    g_h1 = math.sqrt(1.0+h2/n2)
    cross1 = rho_cal_m*math.sqrt(n4/n2)
    cross2 = rho_cal_m*math.sqrt(h2/n2)
    _log.debug("Velocity moments of %r: n2 %g, n4 %g, h2 %g", kinetic, n2, n4, h2)
    return VelocityMoments(n2, n4, h2, scr_m, rho_scr_m, cal_m, rho_cal_m, g_h1, cross1, cross2)

def compute_averaging_constants(spatial: SpatialConstants, mom: VelocityMoments, L: float,
                                theta_W: Optional[float] = None) -> AveragingConstants:
    r"""
        Assembles

        .. math::

            C_{0,\tau} = C_{\mathrm{Lions}}\Big(\frac{c_1 + L c_2}{\|\nabla\psi\|}
            + Z_W^{-1/2}\big(1+\sqrt{2\rho(\mathscr{M})}\max\{1,\theta_W\}\big) + \frac{\rho(\mathcal{M})}{\|\nabla\psi\|}\Big),
            \qquad
            C_{1,\tau} = C_{\mathrm{Lions}}\Big(Z_W^{-1/2} + \frac{\rho(\mathcal{M})\|G\|_{H^1}}{\|\nabla\psi\|}\Big),

        where :math:`c_1, c_2` are the cross terms of :class:`VelocityMoments`.
    """
    if theta_W is None:
        theta_W = spatial.theta_W
    norm = math.sqrt(mom.n2)
    z = spatial.Z_W**-0.5
    c0 = spatial.C_Lions*((mom.cross1+L*mom.cross2)/norm
                          + z*(1.0+math.sqrt(2.0*mom.rho_scrM)*max(1.0, theta_W))
                          + mom.rho_calM/norm)
    c1 = spatial.C_Lions*(z+mom.rho_calM*mom.gH1/norm)
    return AveragingConstants(c0, c1)

__all__ = ("VelocityMoments", "AveragingConstants", "compute_velocity_moments", "compute_averaging_constants")
