r"""
    Constants of the algebraic decay envelopes derived from weighted Poincaré inequalities.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

from dataclasses import dataclass
import logging
from typing import Callable, Optional
from typing_extensions import Literal

from scipy import optimize
from typing_validation import validate

from ..model import ConfigurationError, Model, QuadratureCfg
from ._spatial import SpatialConstants
from ._averaging import AveragingConstants

_log = logging.getLogger(__name__)

WeightedCase = Literal["i", "ii"]
r"""
    Which velocity inequality drives the algebraic envelope: ``"i"`` for a Poincaré inequality,
    ``"ii"`` for a weighted Poincaré inequality.
"""

@dataclass(frozen=True)
class WeightedRateConstants:
    r"""
        Constants of the energy–dissipation inequality :math:`\mathcal{H}_\tau \leq \varphi^{-1}(\mathcal{D}_\tau)`:
        :math:`C_2` always, :math:`A_1, A_2` in case (i), :math:`C_3, B` in case (ii), and
        :math:`\varphi_0=\varphi(\mathcal{H}_\tau(0))`.
    """

    case: WeightedCase
    sigma: float
    H0: float
    C2: float
    phi0: float
    A1: Optional[float] = None
    A2: Optional[float] = None
    C3: Optional[float] = None
    B: Optional[float] = None
    delta: Optional[float] = None

    @property
    def exponent(self) -> float:
        r"""
            Algebraic decay exponent of :math:`\mathcal{H}_\tau(t)`:
            :math:`\sigma/2` or :math:`\sigma\delta/(2(\sigma+\delta+2))`.
        """
        if self.case == "i":
            return self.sigma/2.0
        assert self.delta is not None
        return self.sigma*self.delta/(2.0*(self.sigma+self.delta+2.0))

    def energy_bound(self, t: float) -> float:
        r""" Bound on :math:`\mathcal{H}_\tau(t)` obtained by integrating the differential inequality. """
        if t <= 0.0:
            return self.H0
        sigma = self.sigma
        if self.case == "i":
            assert self.A1 is not None and self.A2 is not None
            rate = 2.0*(self.A1*self.phi0**(2.0/(sigma+2.0))+self.A2)**(-(sigma+2.0)/sigma)/sigma
            return (self.H0**(-2.0/sigma)+rate*t)**(-sigma/2.0)
        assert self.B is not None and self.delta is not None
        e = self.exponent
        delta = self.delta
        rate = self.B**(-(delta+2.0)*(sigma+2.0)/(delta*sigma))/e
        return (self.H0**(-1.0/e)+rate*t)**(-e)

def invert_increasing(fn: Callable[[float], float], target: float, *, rtol: float = 1e-13) -> float:
    r"""
        Solves :math:`f(y) = \mathrm{target}` for an increasing function with :math:`f(0)=0`,
        growing the bracket geometrically.

        >>> invert_increasing(lambda y: y, 1.0)
        1.0
    """
    if target <= 0.0:
        return 0.0
    hi = target
    while fn(hi) < target:
        hi *= 2.0
        if hi > 1e300:
            raise ConfigurationError(f"Error inverting increasing map: value {target!r} not reached.")
    if fn(hi) == target:
        return hi
    lo = hi/2.0
    while fn(lo) > target:
        lo /= 2.0
        if lo < 1e-300:
            lo = 0.0
            break
    return float(optimize.brentq(lambda y: fn(y)-target, lo, hi, xtol=1e-300, rtol=rtol, maxiter=500))

def compute_theorem1_constants(model: Model, spatial: SpatialConstants, averaging: AveragingConstants, gamma: float,
                               h_inf: float, case: WeightedCase, *, initial_energy: Optional[float] = None,
                               cfg: Optional[QuadratureCfg] = None) -> WeightedRateConstants:
    r"""
        Computes the constants of the algebraic envelope.

        .. math::

            C_2 = 4^{2/(\sigma+2)} Z_W^{\sigma/(\sigma+2)} \|h_0\|_\infty^{4/(\sigma+2)}
                \|W\|_{L^\sigma(\mu)}^{2\sigma/(\sigma+2)}.

        In case (i), :math:`A_1 = 1/(2\gamma C_{P,\nu})`
        and :math:`A_2 = C_2(C_{0,\tau}^2/(\gamma C_{P,\nu})+\gamma C_{1,\tau}^2)^{\sigma/(\sigma+2)}`;
        in case (ii), :math:`C_3 = 2^{(4-\delta)/(2+\delta)} P_v^{\delta/(2+\delta)} \gamma^{-\delta/(2+\delta)}
        \|h_0\|_\infty^{4/(2+\delta)} \|\mathcal{G}\|_{L^\delta(\nu)}^{2\delta/(2+\delta)}` and :math:`B` follows.
        The initial energy defaults to :math:`\|h_0\|_\infty^2`, an upper bound on :math:`\mathcal{H}_\tau(0)`.

        :raises ConfigurationError: if the kinetic energy lacks the velocity inequality needed by the case
    """
    # pylint: disable = too-many-arguments, too-many-locals
    validate(model, Model)
    validate(case, WeightedCase)
    if cfg is None:
        cfg = model.quadrature
    if not gamma > 0.0 or not h_inf > 0.0:
        raise ConfigurationError(f"Error computing weighted rate constants: gamma and the sup norm of the initial "
                                 f"datum must be positive (found {gamma!r}, {h_inf!r}).")
    H0 = h_inf**2 if initial_energy is None else float(initial_energy)
    if not 0.0 < H0 <= h_inf**2*(1.0+1e-12):
        raise ConfigurationError(f"Error computing weighted rate constants: initial energy {H0!r} must lie in "
                                 f"(0, {h_inf**2!r}].")
    sigma = model.weight.sigma
    w_norm = model.weight.norm(model.mu, cfg)
    c2 = (4.0**(2.0/(sigma+2.0))*spatial.Z_W**(sigma/(sigma+2.0))*h_inf**(4.0/(sigma+2.0))
          * w_norm**(2.0*sigma/(sigma+2.0)))
    c0t, c1t = averaging.C0_tau, averaging.C1_tau
    s_exp = sigma/(sigma+2.0)
    inequality = model.velocity
    if case == "i":
        if inequality.poincare is None:
            raise ConfigurationError("Error computing case (i) constants: the kinetic energy has no Poincaré constant.")
        c_p = inequality.poincare
        a1 = 1.0/(2.0*gamma*c_p)
        a2 = c2*(c0t**2/(gamma*c_p)+gamma*c1t**2)**s_exp
        phi0 = invert_increasing(lambda y: a1*y+a2*y**s_exp, H0)
        _log.debug("Case (i) constants: C2 %g, A1 %g, A2 %g, phi0 %g", c2, a1, a2, phi0)
        return WeightedRateConstants("i", sigma, H0, c2, phi0, A1=a1, A2=a2)
    if inequality.weight is None or inequality.P_v is None:
        raise ConfigurationError("Error computing case (ii) constants: the kinetic energy has no square-integrable "
                                 "velocity weight.")
    g = inequality.weight
    delta = g.sigma
    g_norm = g.norm(model.nu, cfg)
    d_exp = delta/(2.0+delta)
    c3 = (2.0**((4.0-delta)/(2.0+delta))*inequality.P_v**d_exp*gamma**(-d_exp)*h_inf**(4.0/(2.0+delta))
          * g_norm**(2.0*delta/(2.0+delta)))
    def forward(y: float) -> float:
        return float(c3*y**d_exp+c2*(2.0*c0t**2*c3*y**d_exp+gamma*c1t**2*y)**s_exp)
    phi0 = invert_increasing(forward, H0)
    b = (c3*phi0**(2.0*delta/((delta+2.0)*(sigma+2.0)))
         + c2*(2.0*c0t**2*c3+gamma*c1t**2*phi0**(2.0/(delta+2.0)))**s_exp)
    _log.debug("Case (ii) constants: C2 %g, C3 %g, B %g, phi0 %g", c2, c3, b, phi0)
    return WeightedRateConstants("ii", sigma, H0, c2, phi0, C3=c3, B=b, delta=delta)

__all__ = ("WeightedCase", "WeightedRateConstants", "invert_increasing", "compute_theorem1_constants")
