r"""
    Adaptive quadrature against radially symmetric measures, with truncation driven by tail mass.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

from dataclasses import dataclass
import functools
import logging
import math
from typing import Callable, List, Tuple

import numpy as np
import numpy.typing as npt
from scipy import integrate as _sp_integrate
from scipy import optimize, special
from typing_validation import validate

from .err import ConfigurationError, QuadratureError

_log = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
r"""
    Type alias for the float arrays used throughout the library.
"""

Integrand = Callable[[float], float]
r"""
    Scalar integrand, evaluated at a point of :math:`\mathbb{R}` (in dimension 1) or at a radius (in dimension :math:`d>1`).
"""

LogDensity = Callable[[FloatArray], FloatArray]
r"""
    Vectorised log-density of a radially symmetric measure, as a function of the radius.
"""

_MAX_RADIUS = 1e300

@dataclass(frozen=True)
class QuadratureCfg:
    r"""
        Tolerances and truncation policy for :func:`integrate`.

        The truncation radius :math:`R` is chosen so that the mass of the measure beyond :math:`R` is below :attr:`tail`;
        the integral is then continued past :math:`R` on doubling panels until a panel stops contributing,
        so that integrands growing polynomially against the density are still resolved.
    """

    abs_tol: float = 1e-13
    rel_tol: float = 1e-11
    tail: float = 1e-8
    max_subdivisions: int = 200
    max_panels: int = 400

    def __post_init__(self) -> None:
        for name in ("abs_tol", "rel_tol", "tail"):
            value = getattr(self, name)
            validate(value, float)
            if not value > 0:
                raise ConfigurationError(f"Error configuring quadrature: {name} must be positive (found {value!r}).")
        if self.tail > 1e-4:
            raise ConfigurationError(f"Error configuring quadrature: tail must be at most 1e-4 (found {self.tail!r}).")
        for name in ("max_subdivisions", "max_panels"):
            value = getattr(self, name)
            validate(value, int)
            if value < 1:
                raise ConfigurationError(f"Error configuring quadrature: {name} must be positive (found {value!r}).")

DEFAULT_QUADRATURE = QuadratureCfg()
r"""
    The quadrature configuration used when none is given.
"""

def sphere_area(d: int) -> float:
    r"""
        Surface area of the unit sphere in :math:`\mathbb{R}^d`, with the convention that the 0-sphere has area 2.
    """
    return 2.0*math.pi**(d/2)/math.gamma(d/2)

class Measure:
    r"""
        A radially symmetric measure on :math:`\mathbb{R}^d`, given by a log-density in the radius.

        Integrals in dimension 1 are taken over the whole line; in dimension :math:`d>1` the integrand
        is a function of the radius and integrals are reduced to :math:`\int_0^\infty f(r)\,|S^{d-1}|\,r^{d-1}\rho(r)\,dr`.
    """

    _name: str
    _dim: int
    _log_density: LogDensity
    _normalized: bool

    def __new__(cls, name: str, dim: int, log_density: LogDensity, *, normalized: bool = True) -> Measure:
        validate(name, str)
        validate(dim, int)
        validate(normalized, bool)
        if dim < 1:
            raise ConfigurationError(f"Error constructing measure {name!r}: dimension must be positive (found {dim}).")
        instance = object.__new__(cls)
        instance._name = name
        instance._dim = dim
        instance._log_density = log_density
        instance._normalized = normalized
        return instance

    @property
    def name(self) -> str:
        r""" Short name of the measure, used in diagnostics. """
        return self._name

    @property
    def dim(self) -> int:
        r""" Dimension of the underlying space. """
        return self._dim

    @property
    def normalized(self) -> bool:
        r""" Whether this is a probability measure. """
        return self._normalized

    def log_density(self, r: FloatArray) -> FloatArray:
        r""" Log-density at the given radii. """
        return self._log_density(np.abs(np.asarray(r, dtype=np.float64)))

    def density(self, r: FloatArray) -> FloatArray:
        r""" Density at the given points (or radii). """
        with np.errstate(under="ignore"):
            return np.exp(self.log_density(r))

    def radial_density(self, r: FloatArray) -> FloatArray:
        r"""
            Density of the pushforward of the measure by :math:`x\mapsto|x|`, on :math:`[0,\infty)`.
        """
        r = np.asarray(r, dtype=np.float64)
        if self._dim == 1:
            return 2.0*self.density(r)
        return sphere_area(self._dim)*r**(self._dim-1)*self.density(r)

    def tail_mass(self, r: float, cfg: QuadratureCfg = DEFAULT_QUADRATURE) -> float:
        r"""
            Mass of :math:`\{|x|>r\}`, computed on doubling panels with relative accuracy (tiny masses are resolved).
        """
        return float(tail_masses(self, np.array([r], dtype=np.float64), cfg)[0])

    def radius_for_mass(self, eps: float, cfg: QuadratureCfg = DEFAULT_QUADRATURE) -> float:
        r"""
            Smallest radius :math:`R` (up to bisection accuracy) such that the mass beyond :math:`R` is at most ``eps``.
            For measures which are not normalized, the radius 1 is returned.
        """
        if not self._normalized:
            return 1.0
        return _truncation_radius(self, float(eps), cfg)

    def tail_radius(self, cfg: QuadratureCfg = DEFAULT_QUADRATURE) -> float:
        r""" Truncation radius for the configured tail-mass target. """
        return self.radius_for_mass(cfg.tail, cfg)

    def __repr__(self) -> str:
        return f"Measure({self._name!r}, dim={self._dim})"

@functools.lru_cache(maxsize=1024)
def _truncation_radius(measure: Measure, eps: float, cfg: QuadratureCfg) -> float:
    hi = 1.0
    while measure.tail_mass(hi, cfg) > eps:
        hi *= 4.0
        if hi > _MAX_RADIUS:
            raise QuadratureError(f"Error truncating measure {measure.name!r}: tail mass stays above {eps:g} "
                                  f"up to radius {_MAX_RADIUS:g}.", (hi/4.0, hi))
    if hi == 1.0:
        return 1.0
    target = math.log(eps)
    def gap(log_r: float) -> float:
        mass = measure.tail_mass(math.exp(log_r), cfg)
        return (math.log(mass) if mass > 0 else -1e300) - target
    radius = math.exp(optimize.brentq(gap, math.log(hi/4.0), math.log(hi), xtol=1e-6))
    _log.debug("Truncation radius for %s at tail mass %g: %g", measure.name, eps, radius)
    return radius

def lebesgue(dim: int = 1) -> Measure:
    r""" Lebesgue measure on :math:`\mathbb{R}^d`. """
    return Measure("lebesgue", dim, np.zeros_like, normalized=False)

def _panel(g: Integrand, a: float, b: float, cfg: QuadratureCfg, *, relative: bool = False) -> float:
    epsabs = 0.0 if relative else cfg.abs_tol
    res = _sp_integrate.quad(g, a, b, epsabs=epsabs, epsrel=cfg.rel_tol,
                             limit=cfg.max_subdivisions, full_output=1)
    value, abserr = float(res[0]), float(res[1])
    if len(res) > 3:
        allowance = 100.0*max(epsabs, cfg.rel_tol*abs(value))
        if abserr > allowance and abserr > 1e-300:
            raise QuadratureError(f"Error integrating on [{a:g}, {b:g}]: no convergence after "
                                  f"{cfg.max_subdivisions} subdivisions (error estimate {abserr:g}).",
                                  (a, b), value)
        _log.debug("Quadrature on [%g, %g] flagged but within tolerance: %s", a, b, res[3])
    return value

def _panel_edges(radius: float) -> List[float]:
    edges = [1.0]
    while edges[-1] < radius:
        edges.append(2.0*edges[-1])
    return edges

def _radial_integrand(f: Integrand, measure: Measure) -> Integrand:
    if measure.dim == 1:
        def folded(x: float) -> float:
            rho = float(measure.density(np.float64(x)))
            if rho == 0.0:
                return 0.0
            return (f(x)+f(-x))*rho
        return folded
    area = sphere_area(measure.dim)
    dim = measure.dim
    def radial(r: float) -> float:
        rho = float(measure.density(np.float64(r)))
        if rho == 0.0:
            return 0.0
        return f(r)*area*r**(dim-1)*rho
    return radial

def integrate(f: Integrand, measure: Measure, cfg: QuadratureCfg = DEFAULT_QUADRATURE) -> float:
    r"""
        Integrates ``f`` against ``measure``.

        The integral is computed panel by panel on :math:`[0,1],[1,2],[2,4],\ldots` up to the truncation radius of the measure,
        then continued on doubling panels until a panel contributes less than the configured tolerance.

        :param f: scalar integrand (a point in dimension 1, a radius in dimension :math:`d>1`)
        :param measure: the measure to integrate against
        :param cfg: quadrature configuration

        :raises QuadratureError: if a panel fails to converge, or if the tail panels keep contributing
    """
    validate(measure, Measure)
    validate(cfg, QuadratureCfg)
    g = _radial_integrand(f, measure)
    radius = measure.tail_radius(cfg)
    total = 0.0
    a = 0.0
    for b in _panel_edges(radius):
        total += _panel(g, a, b, cfg)
        a = b
    for _ in range(cfg.max_panels):
        b = 2.0*a
        if b > _MAX_RADIUS:
            break
        piece = _panel(g, a, b, cfg)
        total += piece
        if abs(piece) <= max(cfg.abs_tol, cfg.rel_tol*abs(total)):
            return total
        a = b
    raise QuadratureError(f"Error integrating against {measure.name}: tail panels still contribute "
                          f"beyond radius {a:g}.", (a, 2.0*a), total)

def tail_masses(measure: Measure, radii: FloatArray, cfg: QuadratureCfg = DEFAULT_QUADRATURE) -> FloatArray:
    r"""
        Masses of :math:`\{|x|>r\}` for an array of radii, computed in one sweep from the largest radius inwards,
        so that each segment between consecutive radii is integrated once.
    """
    radii = np.asarray(radii, dtype=np.float64)
    order = np.argsort(radii)
    ordered = np.maximum(radii[order], 0.0)
    def g(r: float) -> float:
        return float(measure.radial_density(np.float64(r)))
    # mass beyond the largest radius, on doubling panels
    last = float(ordered[-1])
    tail = 0.0
    a = last
    for _ in range(cfg.max_panels):
        b = 2.0*max(a, 1.0)
        if b > _MAX_RADIUS:
            break
        piece = _panel(g, a, b, cfg, relative=True)
        tail += piece
        if piece <= 1e-14*tail or (tail == 0.0 and piece == 0.0):
            break
        a = b
    masses = np.empty_like(ordered)
    masses[-1] = tail
    for k in range(len(ordered)-2, -1, -1):
        a, b = float(ordered[k]), float(ordered[k+1])
        piece = 0.0
        while a < b:
            c = min(b, 2.0*max(a, 1.0))
            piece += _panel(g, a, c, cfg, relative=True)
            a = c
        masses[k] = masses[k+1]+piece
    result = np.empty_like(masses)
    result[order] = masses
    if measure.normalized:
        result = np.minimum(result, 1.0)
    return result

def log_bracket(x: FloatArray) -> FloatArray:
    r""" Logarithm of the Japanese bracket :math:`\langle x\rangle=\sqrt{1+|x|^2}`, without overflow. """
    return np.log(np.hypot(1.0, np.asarray(x, dtype=np.float64)))

def cumulative(values: FloatArray, nodes: FloatArray) -> FloatArray:
    r""" Cumulative trapezoidal integral of sampled values, starting at 0. """
    return np.asarray(_sp_integrate.cumulative_trapezoid(values, nodes, initial=0.0), dtype=np.float64)

def log_gamma_ratio(a: float, b: float) -> float:
    r""" Logarithm of :math:`\Gamma(a)/\Gamma(b)`. """
    return float(special.gammaln(a)-special.gammaln(b))

__all__ = ("QuadratureCfg", "DEFAULT_QUADRATURE", "Measure", "lebesgue", "integrate", "tail_masses",
           "sphere_area", "log_bracket", "cumulative", "FloatArray", "Integrand", "LogDensity")
