r"""
    Weight functions for weighted Poincaré inequalities, Muckenhoupt-type bounds on their constants,
    and the velocity functional inequalities attached to kinetic energies.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

from dataclasses import dataclass
import logging
import math
from typing import Optional, Tuple, TYPE_CHECKING
from typing_extensions import Literal

import numpy as np
from scipy import integrate as _sp_integrate
from typing_validation import validate

from .err import ConfigurationError
from ._quadrature import DEFAULT_QUADRATURE, FloatArray, Measure, QuadratureCfg, cumulative, integrate, log_bracket

if TYPE_CHECKING:
    from ._energies import RadialEnergy

_log = logging.getLogger(__name__)

Provenance = Literal["closed-form", "muckenhoupt-numeric", "spectral-gap", "user-supplied"]
r"""
    Where the constant of a weighted Poincaré inequality comes from.
"""

@dataclass(frozen=True)
class Weight:
    r"""
        A weight :math:`W(x)=\langle x\rangle^e \geq 1` with its moment exponent :math:`\sigma`, the bound :math:`\theta_W`
        on :math:`|\nabla W|/W` and the constant :math:`P_W` of the weighted Poincaré inequality

        .. math::

            \mathrm{Var}_{\mu_W}(f) \leq P_W \int |\nabla f|^2 d\mu, \qquad \mu_W = Z_W^{-1} W^{-2}\mu.

        The exponent 0 gives the identity weight.
    """

    exponent: float
    sigma: float
    theta: float = 1.0
    P: float = math.inf
    provenance: Provenance = "closed-form"

    def __post_init__(self) -> None:
        validate(self.exponent, float)
        validate(self.sigma, float)
        validate(self.theta, float)
        validate(self.P, float)
        if not 0.0 <= self.exponent < math.inf:
            raise ConfigurationError(f"Error constructing weight: exponent must be non-negative (found {self.exponent!r}).")
        if not 0.0 < self.sigma:
            raise ConfigurationError(f"Error constructing weight: moment exponent must be positive (found {self.sigma!r}).")
        if not 0.0 <= self.theta < math.inf:
            raise ConfigurationError(f"Error constructing weight: theta must be non-negative (found {self.theta!r}).")
        if not self.P > 0.0:
            raise ConfigurationError(f"Error constructing weight: Poincaré constant must be positive (found {self.P!r}).")

    @property
    def is_identity(self) -> bool:
        r""" Whether :math:`W\equiv 1`. """
        return self.exponent == 0.0

    def value(self, x: FloatArray) -> FloatArray:
        r""" :math:`W(x)`. """
        return np.exp(self.exponent*log_bracket(x))

    def log_grad(self, x: FloatArray) -> FloatArray:
        r""" :math:`|\nabla W|/W` at the given points. """
        x = np.abs(np.asarray(x, dtype=np.float64))
        return self.exponent*x/(1.0+x**2)

    def inverse(self, y: float) -> float:
        r"""
            Radius at which the weight reaches the value ``y``; 0 for ``y <= 1``, infinite for the identity weight with ``y > 1``.
        """
        if y <= 1.0:
            return 0.0
        if self.is_identity:
            return math.inf
        log_y = math.log(y)/self.exponent
        if log_y > 700.0:
            return math.inf
        if log_y > 350.0:
            return math.exp(log_y)
        return math.sqrt(math.expm1(2.0*log_y))

    def normalizer(self, measure: Measure, cfg: QuadratureCfg = DEFAULT_QUADRATURE) -> float:
        r""" :math:`Z_W = \int W^{-2} d\mu`. """
        if self.is_identity:
            return 1.0
        e = self.exponent
        return integrate(lambda x: math.exp(-2.0*e*float(log_bracket(np.float64(x)))), measure, cfg)

    def moment(self, measure: Measure, power: Optional[float] = None, cfg: QuadratureCfg = DEFAULT_QUADRATURE) -> float:
        r""" :math:`\int W^{\sigma} d\mu`, or the moment of the given power. """
        if power is None:
            power = self.sigma
        if self.is_identity:
            return 1.0
        e = self.exponent*power
        return integrate(lambda x: math.exp(e*float(log_bracket(np.float64(x)))), measure, cfg)

    def norm(self, measure: Measure, cfg: QuadratureCfg = DEFAULT_QUADRATURE) -> float:
        r""" :math:`\|W\|_{L^\sigma(\mu)}`. """
        return self.moment(measure, None, cfg)**(1.0/self.sigma)

    def weighted_measure(self, measure: Measure, cfg: QuadratureCfg = DEFAULT_QUADRATURE) -> Measure:
        r""" The probability measure :math:`\mu_W = Z_W^{-1}W^{-2}\mu`. """
        log_z = math.log(self.normalizer(measure, cfg))
        e = self.exponent
        return Measure(f"{measure.name}_W", measure.dim,
                       lambda r: measure.log_density(r)-2.0*e*log_bracket(r)-log_z)

    def with_constant(self, P: float, provenance: Provenance) -> Weight:
        r""" Returns a copy with the given weighted Poincaré constant. """
        return Weight(self.exponent, self.sigma, self.theta, float(P), provenance)

def muckenhoupt_bound(energy: RadialEnergy, exponent: float, *, cutoff: float = 600.0, num_nodes: int = 6000) -> float:
    r"""
        Muckenhoupt-type bound on the constant of the unnormalized weighted Poincaré inequality in dimension 1:

        .. math::

            \int (f-c)^2 \langle x\rangle^{-2e}\, d\mu \leq 4B \int |f'|^2 d\mu,
            \qquad B = \sup_{x>0} \rho([x,\infty)) \int_0^x \frac{dy}{n(y)},

        where :math:`n` is the density of the Gibbs measure of ``energy`` and :math:`\rho = \langle x\rangle^{-2e}\mu`.
        The supremum is taken on a grid reaching the radius where the energy exceeds its minimum by ``cutoff``.

        Returns :math:`4B`.
    """
    if energy.dim != 1:
        raise ConfigurationError(f"Error bounding weighted Poincaré constant of {energy!r}: only dimension 1 is supported.")
    e0 = float(energy.value(np.float64(0.0)))
    hi = 1.0
    while float(energy.value(np.float64(hi)))-e0 < cutoff and hi < 1e150:
        hi *= 2.0
    nodes = np.concatenate([np.linspace(0.0, 1.0, 256, endpoint=False), np.geomspace(1.0, hi, num_nodes)])
    log_z = math.log(energy.normalizer())
    log_n = -energy.value(nodes)-log_z
    log_rho = log_n-2.0*exponent*log_bracket(nodes)
    inv_n = cumulative(np.exp(-log_n), nodes)
    rho = np.exp(log_rho)
    head = cumulative(rho, nodes)
    beyond = _sp_integrate.quad(lambda y: math.exp(-float(energy.value(np.float64(y)))-log_z
                                                  -2.0*exponent*float(log_bracket(np.float64(y)))),
                                hi, math.inf, epsabs=0.0, epsrel=1e-8, limit=200)[0]
    rho_tail = head[-1]-head+beyond
    b = float(np.max(rho_tail*inv_n))
    _log.debug("Muckenhoupt bound for %r with weight exponent %g: B = %g on [0, %g]", energy, exponent, b, hi)
    return 4.0*b

BetaKind = Literal["weighted", "poly", "stretched-exp"]
r"""
    Kinds of velocity weak Poincaré functions: derived from the velocity weight, or given in closed form.
"""

@dataclass(frozen=True)
class BetaDescriptor:
    r"""
        Description of a velocity weak Poincaré function :math:`\beta_v`, turned into a callable by :mod:`hypocert.weakpi`.
        Closed-form kinds carry their parameters: :math:`(\eta_0,\eta_1)` for ``"poly"``,
        :math:`(\eta_0,\eta_1,\eta_2)` for ``"stretched-exp"``.
    """

    kind: BetaKind
    params: Tuple[float, ...] = ()

    def __post_init__(self) -> None:
        validate(self.kind, BetaKind)
        expected = {"weighted": 0, "poly": 2, "stretched-exp": 3}[self.kind]
        if len(self.params) != expected:
            raise ConfigurationError(f"Error describing velocity beta of kind {self.kind!r}: "
                                     f"expected {expected} parameters, found {len(self.params)}.")
        if any(not 0.0 < p < math.inf for p in self.params):
            raise ConfigurationError(f"Error describing velocity beta of kind {self.kind!r}: parameters must be positive.")

VelocityInequalityKind = Literal["poincare", "weighted", "weak"]
r"""
    Which velocity functional inequality drives a certificate:
    a Poincaré inequality (constant :math:`C_{P,\nu}`), a weighted Poincaré inequality (weight :math:`\mathcal{G}`,
    exponent :math:`\delta` and constant :math:`P_v`), or a weak Poincaré inequality (:math:`\beta_v`).
"""

@dataclass(frozen=True)
class VelocityInequality:
    r"""
        The velocity functional inequalities known for a kinetic energy, with one of them designated active.

        The weight carries :math:`\delta` as its moment exponent and the normalized constant :math:`P_\mathcal{G}`;
        :attr:`P_v` is the constant of the unnormalized inequality centred at the :math:`\nu`-mean.
    """

    active: VelocityInequalityKind
    poincare: Optional[float] = None
    weight: Optional[Weight] = None
    P_v: Optional[float] = None
    beta: Optional[BetaDescriptor] = None

    def __post_init__(self) -> None:
        validate(self.active, VelocityInequalityKind)
        if self.active == "poincare" and self.poincare is None:
            raise ConfigurationError("Error designating velocity inequality: 'poincare' requires a Poincaré constant.")
        if self.active == "weighted" and (self.weight is None or self.P_v is None):
            raise ConfigurationError("Error designating velocity inequality: 'weighted' requires a weight and P_v.")
        if self.active == "weak" and self.beta is None:
            raise ConfigurationError("Error designating velocity inequality: 'weak' requires a beta function.")
        if self.poincare is not None and not 0.0 < self.poincare < math.inf:
            raise ConfigurationError(f"Error designating velocity inequality: Poincaré constant must be positive "
                                     f"and finite (found {self.poincare!r}).")

    @property
    def delta_w(self) -> float:
        r""" Moment exponent :math:`\delta` of the velocity weight. """
        if self.weight is None:
            raise ConfigurationError("Error reading velocity weight exponent: no velocity weight is known.")
        return self.weight.sigma

__all__ = ("Provenance", "Weight", "muckenhoupt_bound", "BetaKind", "BetaDescriptor",
           "VelocityInequalityKind", "VelocityInequality")
