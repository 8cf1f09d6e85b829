r"""
    Benchmark potential and kinetic energies, as radially symmetric evaluator triples.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

import functools
import math
from typing import Optional, Tuple, TYPE_CHECKING
from typing_extensions import Literal

import numpy as np
from scipy import special
from typing_validation import validate

from .err import ConfigurationError
from ._quadrature import DEFAULT_QUADRATURE, FloatArray, Measure, QuadratureCfg, integrate, log_bracket

if TYPE_CHECKING:
    from ._weights import VelocityInequality

PotentialKind = Literal["subexp", "log"]
r"""
    Kinds of benchmark potentials: :math:`\phi(x)=\langle x\rangle^\alpha` or :math:`\phi(x)=(d+p)\log\langle x\rangle`.
"""

KineticKind = Literal["subexp", "log", "gaussian"]
r"""
    Kinds of benchmark kinetic energies: :math:`\langle v\rangle^\delta`, :math:`(d+q)\log\langle v\rangle` or :math:`|v|^2/2`.
"""

def bracket(x: FloatArray) -> FloatArray:
    r""" The Japanese bracket :math:`\langle x\rangle=\sqrt{1+|x|^2}`. """
    return np.hypot(1.0, np.asarray(x, dtype=np.float64))

class RadialEnergy:
    r"""
        Common base for :class:`Potential` and :class:`Kinetic`: a radially symmetric energy :math:`E(x) = e(|x|)`
        on :math:`\mathbb{R}^d`, together with its Gibbs measure :math:`e^{-E}/Z`.

        Evaluators accept signed points in dimension 1 and radii otherwise; the gradient is returned as the radial derivative
        with the sign of the point, and the Hessian as its pair of (radial, tangential) eigenvalues.
    """

    _kind: str
    _param: float
    _dim: int

    def __new__(cls, kind: str, param: float, dim: int = 1) -> RadialEnergy:
        validate(dim, int)
        validate(param, float)
        if dim < 1:
            raise ConfigurationError(f"Error constructing {cls.__name__.lower()}: dimension must be positive (found {dim}).")
        if not math.isfinite(param) or (kind != "gaussian" and param <= 0):
            raise ConfigurationError(f"Error constructing {cls.__name__.lower()} of kind {kind!r}: "
                                     f"parameter must be positive and finite (found {param!r}).")
        instance = object.__new__(cls)
        instance._kind = kind
        instance._param = param
        instance._dim = dim
        return instance

    @property
    def kind(self) -> str:
        r""" The benchmark family. """
        return self._kind

    @property
    def param(self) -> float:
        r""" The family parameter (:math:`\alpha`, :math:`p`, :math:`\delta` or :math:`q`; 2 for the Gaussian). """
        return self._param

    @property
    def dim(self) -> int:
        r""" Dimension of the underlying space. """
        return self._dim

    @property
    def log_order(self) -> float:
        r""" Coefficient :math:`d+p` of the logarithmic family. """
        return self._dim+self._param

    def value(self, x: FloatArray) -> FloatArray:
        r""" Energy at the given points. """
        x = np.asarray(x, dtype=np.float64)
        if self._kind == "subexp":
            return np.exp(self._param*log_bracket(x))
        if self._kind == "log":
            return self.log_order*log_bracket(x)
        return 0.5*x**2

    def grad(self, x: FloatArray) -> FloatArray:
        r""" Radial derivative of the energy, carrying the sign of the point. """
        x = np.asarray(x, dtype=np.float64)
        if self._kind == "subexp":
            a = self._param
            return a*x*np.exp((a-2.0)*log_bracket(x))
        if self._kind == "log":
            return self.log_order*x/(1.0+x**2)
        return x

    def hessian(self, x: FloatArray) -> Tuple[FloatArray, FloatArray]:
        r""" Radial and tangential eigenvalues of the Hessian (the tangential one has multiplicity :math:`d-1`). """
        x = np.asarray(x, dtype=np.float64)
        if self._kind == "subexp":
            a = self._param
            lb = log_bracket(x)
            radial = a*np.exp((a-4.0)*lb)*(1.0+(a-1.0)*x**2)
            tangential = a*np.exp((a-2.0)*lb)
            return radial, tangential
        if self._kind == "log":
            c = self.log_order
            return c*(1.0-x**2)/(1.0+x**2)**2, c/(1.0+x**2)
        ones = np.ones_like(x)
        return ones, ones

    @property
    def lipschitz(self) -> float:
        r""" Global bound :math:`L` on :math:`|\nabla E|`, infinite for super-linear growth. """
        if self._kind == "log":
            return self.log_order/2.0
        if self._kind == "gaussian":
            return math.inf
        a = self._param
        if a > 1.0:
            return math.inf
        if a == 1.0:
            return 1.0
        return a/math.sqrt(1.0-a)*((2.0-a)/(1.0-a))**(a/2.0-1.0)

    @property
    def hessian_bound(self) -> float:
        r""" Global bound :math:`M` on the Hessian eigenvalues in absolute value, infinite when unbounded. """
        if self._kind == "log":
            return self.log_order
        if self._kind == "gaussian":
            return 1.0
        a = self._param
        if a <= 1.0:
            return a
        if a > 2.0:
            return math.inf
        r = np.concatenate([np.linspace(0.0, 10.0, 2001), np.geomspace(10.0, 1e8, 400)])
        radial, tangential = self.hessian(r)
        return float(max(np.max(np.abs(radial)), np.max(np.abs(tangential))))

    def normalizer(self, cfg: QuadratureCfg = DEFAULT_QUADRATURE) -> float:
        r"""
            The normalizer :math:`Z=\int e^{-E}`. Closed form for the logarithmic and Gaussian families, quadrature otherwise.
        """
        return _normalizer(self._kind, self._param, self._dim, self._symbol, cfg)

    def measure(self, cfg: QuadratureCfg = DEFAULT_QUADRATURE) -> Measure:
        r""" The Gibbs probability measure :math:`e^{-E}/Z`. """
        return _gibbs_measure(self._kind, self._param, self._dim, self._symbol, cfg)

    @property
    def _symbol(self) -> str:
        return "E"

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self._kind!r}, {self._param!r}, dim={self._dim})"

@functools.lru_cache(maxsize=256)
def _normalizer(kind: str, param: float, dim: int, symbol: str, cfg: QuadratureCfg) -> float:
    energy = RadialEnergy(kind, param, dim)
    if kind == "log":
        z = math.pi**(dim/2)*math.exp(special.gammaln(param/2)-special.gammaln(energy.log_order/2))
    elif kind == "gaussian":
        z = (2.0*math.pi)**(dim/2)
    else:
        unnormalized = Measure(f"exp(-{symbol})", dim, lambda r: -energy.value(r), normalized=False)
        z = integrate(lambda _: 1.0, unnormalized, cfg)
    if not 0.0 < z < math.inf:
        raise ConfigurationError(f"Error normalizing {energy!r}: normalizer is not finite and positive (found {z!r}).")
    return z

@functools.lru_cache(maxsize=256)
def _gibbs_measure(kind: str, param: float, dim: int, symbol: str, cfg: QuadratureCfg) -> Measure:
    energy = RadialEnergy(kind, param, dim)
    log_z = math.log(_normalizer(kind, param, dim, symbol, cfg))
    return Measure(symbol, dim, lambda r: -energy.value(r)-log_z)

class Potential(RadialEnergy):
    r"""
        Benchmark potential energy :math:`\phi`.

        >>> phi = Potential("log", 2.0)
        >>> phi.lipschitz
        1.5
    """

    def __new__(cls, kind: PotentialKind, param: float, dim: int = 1) -> Potential:
        validate(kind, PotentialKind)
        instance = super().__new__(cls, kind, float(param), dim)
        assert isinstance(instance, Potential)
        return instance

    @property
    def strongly_confining(self) -> bool:
        r""" Whether the Gibbs measure satisfies a standard Poincaré inequality (:math:`\alpha\geq 1`). """
        return self._kind == "subexp" and self._param >= 1.0

    @property
    def _symbol(self) -> str:
        return "mu"

class Kinetic(RadialEnergy):
    r"""
        Benchmark kinetic energy :math:`\psi`.
        The velocity functional inequality used by certificates is attached by :func:`~hypocert.model.make_benchmark`.
    """

    _inequality: Optional[VelocityInequality]

    def __new__(cls, kind: KineticKind, param: Optional[float] = None, dim: int = 1, *,
                inequality: Optional[VelocityInequality] = None) -> Kinetic:
        validate(kind, KineticKind)
        if kind == "gaussian":
            param = 2.0
        elif param is None:
            raise ConfigurationError(f"Error constructing kinetic energy of kind {kind!r}: parameter is required.")
        instance = super().__new__(cls, kind, float(param), dim)
        assert isinstance(instance, Kinetic)
        instance._inequality = inequality
        return instance

    @property
    def poincare_like(self) -> bool:
        r""" Whether the velocity marginal satisfies a standard Poincaré inequality (Gaussian, or :math:`\delta\geq 1`). """
        return self._kind == "gaussian" or (self._kind == "subexp" and self._param >= 1.0)

    @property
    def inequality(self) -> VelocityInequality:
        r"""
            The active velocity functional inequality.

            :raises ConfigurationError: if none has been attached
        """
        if self._inequality is None:
            raise ConfigurationError(f"Error reading velocity inequality of {self!r}: none has been designated.")
        return self._inequality

    @property
    def has_inequality(self) -> bool:
        r""" Whether a velocity inequality has been attached. """
        return self._inequality is not None

    def with_inequality(self, inequality: VelocityInequality) -> Kinetic:
        r""" Returns a copy of this kinetic energy with the given velocity inequality attached. """
        return Kinetic(self._kind, self._param, self._dim, inequality=inequality) # type: ignore[arg-type]

    @property
    def _symbol(self) -> str:
        return "nu"

__all__ = ("PotentialKind", "KineticKind", "bracket", "RadialEnergy", "Potential", "Kinetic")
