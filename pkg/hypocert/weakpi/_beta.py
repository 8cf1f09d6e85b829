r"""
    Weak Poincaré functions :math:`\beta:(0,\infty)\to[0,\infty)`, nonincreasing with limit 0 at infinity,
    and the operations combining them: shifts, chaining and rescaling.

    All variants are vectorised callables returning arrays of the same shape as their argument.
    Tabulated variants (tails and chains) interpolate in log-log coordinates and offer
    :meth:`BetaFn.exact` for a direct evaluation.
    Between nodes the interpolant is raised by a slack measured against :meth:`BetaFn.exact` at interval
    midpoints and tapering linearly to zero at the right node, then capped by the value at the left node,
    which bounds a nonincreasing function from above.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

import logging
import math
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
import numpy.typing as npt
from scipy import interpolate, optimize
from typing_validation import validate

from ..model import ConfigurationError, DEFAULT_QUADRATURE, FloatArray, Measure, QuadratureCfg, Weight, tail_masses
from ._options import get_options

_log = logging.getLogger(__name__)

_TINY = 1e-300
_MASS_FLOOR = 1e-280
_S_CAP = 1e290
_CHAIN_S_RANGE = (1e-6, 1e300)
_CHAIN_S1_RANGE = (1e-12, 1e300)
_ROWS_PER_BLOCK = 64
_SLACK_CHECKS = 32

class BetaFn:
    r"""
        Base class for weak Poincaré functions.

        Subclasses implement :meth:`_eval` on float arrays. Calling an instance accepts scalars or arrays:

        >>> beta = Poly(1.0, 1.0)
        >>> float(beta(4.0))
        0.25
    """

    def __call__(self, s: npt.ArrayLike) -> FloatArray:
        s = np.asarray(s, dtype=np.float64)
        with np.errstate(divide="ignore", over="ignore", under="ignore", invalid="ignore"):
            return self._eval(s)

    def _eval(self, s: FloatArray) -> FloatArray:
        raise NotImplementedError()

    def at(self, s: float) -> float:
        r""" Value at a single point, as a float. """
        return float(self(np.float64(s)))

    def exact(self, s: float) -> float:
        r""" Value at a single point, bypassing any tabulation. """
        return self.at(s)

    def at_zero(self) -> float:
        r""" Limit :math:`\beta(0^+)`, possibly infinite. """
        return self.at(_TINY)

    def describe(self) -> Dict[str, Any]:
        r""" JSON-friendly description of this function. """
        raise NotImplementedError()

    def __repr__(self) -> str:
        params = ", ".join(f"{k}={v!r}" for k, v in self.describe().items() if k != "kind")
        return f"{type(self).__name__}({params})"

class Poly(BetaFn):
    r"""
        :math:`\beta(s) = \eta_0 s^{-\eta_1}`.
    """

    _eta0: float
    _eta1: float

    def __new__(cls, eta0: float, eta1: float) -> Poly:
        validate(eta0, float)
        validate(eta1, float)
        if not 0.0 < eta0 < math.inf or not 0.0 < eta1 < math.inf:
            raise ConfigurationError(f"Error constructing polynomial beta: parameters must be positive "
                                     f"(found {eta0!r}, {eta1!r}).")
        instance = object.__new__(cls)
        instance._eta0 = eta0
        instance._eta1 = eta1
        return instance

    @property
    def eta0(self) -> float:
        r""" Prefactor :math:`\eta_0`. """
        return self._eta0

    @property
    def eta1(self) -> float:
        r""" Decay exponent :math:`\eta_1`. """
        return self._eta1

    def _eval(self, s: FloatArray) -> FloatArray:
        return self._eta0*np.power(s, -self._eta1)

    def at_zero(self) -> float:
        return math.inf

    def kstar_closed_form(self) -> Tuple[float, float]:
        r"""
            Coefficient and power of the closed-form conjugate
            :math:`K^*(w) = \eta_0\eta_1(\eta_0(1+\eta_1))^{-1-1/\eta_1} w^{1+1/\eta_1}`.

            >>> Poly(1.0, 1.0).kstar_closed_form()
            (0.25, 2.0)
        """
        e0, e1 = self._eta0, self._eta1
        return e0*e1*(e0*(1.0+e1))**(-1.0-1.0/e1), 1.0+1.0/e1

    def describe(self) -> Dict[str, Any]:
        return {"kind": "poly", "eta0": self._eta0, "eta1": self._eta1}

class StretchedExp(BetaFn):
    r"""
        :math:`\beta(s) = \eta_0 \exp(-\eta_1 s^{\eta_2})`.
    """

    _eta0: float
    _eta1: float
    _eta2: float

    def __new__(cls, eta0: float, eta1: float, eta2: float) -> StretchedExp:
        for eta in (eta0, eta1, eta2):
            validate(eta, float)
            if not 0.0 < eta < math.inf:
                raise ConfigurationError(f"Error constructing stretched-exponential beta: parameters must be positive "
                                         f"(found {eta0!r}, {eta1!r}, {eta2!r}).")
        instance = object.__new__(cls)
        instance._eta0 = eta0
        instance._eta1 = eta1
        instance._eta2 = eta2
        return instance

    @property
    def params(self) -> Tuple[float, float, float]:
        r""" The parameters :math:`(\eta_0,\eta_1,\eta_2)`. """
        return self._eta0, self._eta1, self._eta2

    def _eval(self, s: FloatArray) -> FloatArray:
        return self._eta0*np.exp(-self._eta1*np.power(s, self._eta2))

    def at_zero(self) -> float:
        return self._eta0

    def describe(self) -> Dict[str, Any]:
        return {"kind": "stretched-exp", "eta0": self._eta0, "eta1": self._eta1, "eta2": self._eta2}

def _left_node_cap(log_s_nodes: FloatArray, log_beta_nodes: FloatArray, log_s: FloatArray,
                   log_beta: FloatArray, log_slack: float) -> FloatArray:
    n = len(log_s_nodes)
    k = np.clip(np.searchsorted(log_s_nodes, log_s, side="right")-1, 0, n-1)
    nxt = np.minimum(k+1, n-1)
    width = log_s_nodes[nxt]-log_s_nodes[k]
    t = np.clip(np.divide(log_s-log_s_nodes[k], width, out=np.zeros_like(log_s), where=width > 0.0), 0.0, 1.0)
    # 2(1-t): full slack at midpoints, none at the right node, nonincreasing in t
    return np.minimum(log_beta+2.0*(1.0-t)*log_slack, log_beta_nodes[k])

def _measure_slack(beta: Union[Tail, Chained], log_s_nodes: FloatArray) -> float:
    # largest exact/interpolated ratio at sampled interval midpoints, in log
    n = len(log_s_nodes)
    if n < 2:
        return 0.0
    idx = np.unique(np.linspace(0, n-2, min(n-1, _SLACK_CHECKS)).astype(np.int64))
    mids = 0.5*(log_s_nodes[idx]+log_s_nodes[idx+1])
    log_slack = 0.0
    for ls in mids:
        s = math.exp(float(ls))
        approx = float(beta._interpolated(np.array([s]))[0]) # pylint: disable = protected-access
        if approx <= _MASS_FLOOR:
            continue
        true = beta.exact(s)
        if true > approx:
            log_slack = max(log_slack, math.log(true/approx))
    return log_slack

class Tail(BetaFn):
    r"""
        :math:`\beta(s) = m(s \leq A\,W^2 + B)`, the mass of the region where a weight is large.

        The mass is tabulated once by a single radial sweep on a grid of values of :math:`W^2`,
        from the level where the condition holds everywhere (:math:`\beta=1`) out to the level
        where the mass drops below :math:`10^{-280}`, and interpolated monotonically in log-log
        coordinates. Beyond the tabulated range the last log-log slope is continued.
        For the identity weight, :math:`\beta` is the indicator of :math:`s\leq A+B`.
    """

    _measure: Measure
    _weight: Weight
    _A: float
    _B: float
    _cfg: QuadratureCfg
    _log_s: Optional[FloatArray]
    _log_beta: Optional[FloatArray]
    _interp: Optional[interpolate.PchipInterpolator]
    _log_slack: float

    def __new__(cls, measure: Measure, weight: Weight, A: float, B: float = 0.0, *,
                cfg: QuadratureCfg = DEFAULT_QUADRATURE, num_points: Optional[int] = None) -> Tail:
        validate(measure, Measure)
        validate(weight, Weight)
        validate(A, float)
        validate(B, float)
        if not 0.0 < A < math.inf or not 0.0 <= B < math.inf:
            raise ConfigurationError(f"Error constructing tail beta: need A > 0 and B >= 0 (found {A!r}, {B!r}).")
        if not measure.normalized:
            raise ConfigurationError(f"Error constructing tail beta: {measure!r} is not a probability measure.")
        instance = object.__new__(cls)
        instance._measure = measure
        instance._weight = weight
        instance._A = A
        instance._B = B
        instance._cfg = cfg
        instance._log_s = None
        instance._log_beta = None
        instance._interp = None
        instance._log_slack = 0.0
        if not weight.is_identity:
            if num_points is None:
                num_points = int(get_options()["tail_points"])
            instance._tabulate(num_points)
        return instance

    @property
    def threshold(self) -> float:
        r""" The value :math:`A+B`, at and below which :math:`\beta = 1`. """
        return self._A+self._B

    @property
    def nodes(self) -> Tuple[FloatArray, FloatArray]:
        r""" Tabulation nodes :math:`(s_k, \beta(s_k))`; empty for the identity weight. """
        if self._log_s is None or self._log_beta is None:
            return np.empty(0), np.empty(0)
        return np.exp(self._log_s), np.exp(self._log_beta)

    def _radii(self, log_u: FloatArray) -> FloatArray:
        return np.array([self._weight.inverse(math.exp(0.5*lu)) for lu in log_u], dtype=np.float64)

    def _tabulate(self, num_points: int) -> None:
        A, B, e = self._A, self._B, self._weight.exponent
        log_u_cap = min(math.log(max(_S_CAP-B, 1.0)/A), 2.0*e*math.log(1e300))
        if log_u_cap <= 0.0:
            raise ConfigurationError(f"Error tabulating tail beta: A = {A!r} leaves no room below s = {_S_CAP:g}.")
        # coarse sweep to locate the level where the mass becomes negligible
        coarse = np.linspace(0.0, log_u_cap, 60)
        masses = tail_masses(self._measure, self._radii(coarse), self._cfg)
        above = np.nonzero(masses > _MASS_FLOOR)[0]
        last = int(above[-1]) if len(above) > 0 else 0
        log_u_max = float(coarse[min(last+1, len(coarse)-1)])
        log_u = np.linspace(0.0, log_u_max, num_points)
        masses = tail_masses(self._measure, self._radii(log_u), self._cfg)
        masses = np.clip(masses, _TINY, 1.0)
        masses[0] = 1.0
        self._log_s = np.log(A*np.exp(log_u)+B)
        self._log_beta = np.minimum.accumulate(np.log(masses))
        self._interp = interpolate.PchipInterpolator(self._log_s, self._log_beta, extrapolate=False)
        self._log_slack = _measure_slack(self, self._log_s)
        _log.debug("Tail beta over %s tabulated on s in [%g, %g], beta down to %g",
                   self._measure.name, math.exp(self._log_s[0]), math.exp(self._log_s[-1]), masses[-1])

    @property
    def interp_slack(self) -> float:
        r""" Factor, at least 1, by which the interpolant is raised between nodes. """
        return math.exp(self._log_slack)

    def _eval(self, s: FloatArray) -> FloatArray:
        out = self._interpolated(s)
        if self._log_s is None or self._log_beta is None:
            return out
        log_s = np.log(np.maximum(s, _TINY))
        inside = (s > self.threshold) & (log_s <= self._log_s[-1])
        out[inside] = np.exp(_left_node_cap(self._log_s, self._log_beta, log_s[inside], np.log(out[inside]),
                                            self._log_slack))
        return np.minimum(out, 1.0)

    def _interpolated(self, s: FloatArray) -> FloatArray:
        out = np.ones_like(s)
        if self._weight.is_identity:
            out[s > self.threshold] = 0.0
            return out
        assert self._log_s is not None and self._log_beta is not None and self._interp is not None
        log_s = np.log(np.maximum(s, _TINY))
        inside = (s > self.threshold) & (log_s <= self._log_s[-1])
        out[inside] = np.exp(self._interp(log_s[inside]))
        beyond = log_s > self._log_s[-1]
        if np.any(beyond):
            slope = (self._log_beta[-1]-self._log_beta[-2])/(self._log_s[-1]-self._log_s[-2])
            out[beyond] = np.exp(self._log_beta[-1]+slope*(log_s[beyond]-self._log_s[-1]))
        return np.minimum(out, 1.0)

    def exact(self, s: float) -> float:
        r""" Direct quadrature of the tail mass at ``s``. """
        if s <= self.threshold:
            return 1.0
        if self._weight.is_identity:
            return 0.0
        radius = self._weight.inverse(math.sqrt((s-self._B)/self._A))
        if math.isinf(radius):
            return 0.0
        return self._measure.tail_mass(radius, self._cfg)

    def at_zero(self) -> float:
        return 1.0

    def describe(self) -> Dict[str, Any]:
        return {"kind": "tail", "measure": self._measure.name, "weight_exponent": self._weight.exponent,
                "A": self._A, "B": self._B}

class Shifted(BetaFn):
    r"""
        :math:`\tilde\beta(s) = \beta(s-c)` for :math:`s\geq c` and :math:`\beta(0^+)` below,
        capped at 1/4: the variance of a function never exceeds a quarter of its squared oscillation.
    """

    _inner: BetaFn
    _c: float
    _cap: float

    def __new__(cls, inner: BetaFn, c: float) -> Shifted:
        validate(inner, BetaFn)
        validate(c, float)
        if not 0.0 <= c < math.inf:
            raise ConfigurationError(f"Error shifting beta: shift must be non-negative and finite (found {c!r}).")
        instance = object.__new__(cls)
        instance._inner = inner
        instance._c = c
        zero = inner.at_zero()
        instance._cap = min(zero, 0.25) if math.isfinite(zero) else 0.25
        return instance

    @property
    def inner(self) -> BetaFn:
        r""" The unshifted function. """
        return self._inner

    @property
    def c(self) -> float:
        r""" The shift. """
        return self._c

    def _eval(self, s: FloatArray) -> FloatArray:
        return np.minimum(self._inner(np.maximum(s-self._c, 0.0)), self._cap)

    def exact(self, s: float) -> float:
        return min(self._inner.exact(max(s-self._c, 0.0)) if s > self._c else math.inf, self._cap)

    def at_zero(self) -> float:
        return self._cap

    def describe(self) -> Dict[str, Any]:
        return {"kind": "shifted", "c": self._c, "inner": self._inner.describe()}

class Scaled(BetaFn):
    r"""
        :math:`s \mapsto C\,\beta(\lambda s)` with prefactor :math:`C\geq 0` and time scale :math:`\lambda>0`.
    """

    _inner: BetaFn
    _scale: float
    _prefactor: float

    def __new__(cls, inner: BetaFn, scale: float, prefactor: float = 1.0) -> Scaled:
        validate(inner, BetaFn)
        validate(scale, float)
        validate(prefactor, float)
        if not 0.0 < scale < math.inf or not 0.0 <= prefactor < math.inf:
            raise ConfigurationError(f"Error scaling beta: need scale > 0 and prefactor >= 0 "
                                     f"(found {scale!r}, {prefactor!r}).")
        instance = object.__new__(cls)
        instance._inner = inner
        instance._scale = scale
        instance._prefactor = prefactor
        return instance

    @property
    def inner(self) -> BetaFn:
        r""" The unscaled function. """
        return self._inner

    @property
    def scale(self) -> float:
        r""" Time scale applied to the argument. """
        return self._scale

    @property
    def prefactor(self) -> float:
        r""" Prefactor applied to the value. """
        return self._prefactor

    def _eval(self, s: FloatArray) -> FloatArray:
        if self._prefactor == 0.0:
            return np.zeros_like(s)
        return self._prefactor*self._inner(self._scale*s)

    def exact(self, s: float) -> float:
        if self._prefactor == 0.0:
            return 0.0
        return self._prefactor*self._inner.exact(self._scale*s)

    def at_zero(self) -> float:
        if self._prefactor == 0.0:
            return 0.0
        return self._prefactor*self._inner.at_zero()

    def describe(self) -> Dict[str, Any]:
        return {"kind": "scaled", "scale": self._scale, "prefactor": self._prefactor,
                "inner": self._inner.describe()}

def _log_grid(lo: float, hi: float, per_decade: int) -> FloatArray:
    decades = math.log10(hi)-math.log10(lo)
    return np.linspace(math.log(lo), math.log(hi), int(math.ceil(decades*per_decade))+1)

def chain_objective(beta_x: BetaFn, shifted_v: BetaFn, s: float, s1: float) -> float:
    r"""
        The chaining objective :math:`s_1\tilde\beta_v(s/s_1) + \beta_x(s_1)` at a single split,
        where ``shifted_v`` is the already shifted velocity function.
    """
    return s1*shifted_v.at(s/s1)+beta_x.at(s1)

def _minimize_chain(beta_x: BetaFn, shifted_v: BetaFn, log_s: FloatArray,
                    log_s1: FloatArray) -> Tuple[FloatArray, FloatArray]:
    # pylint: disable = too-many-locals
    s1 = np.exp(log_s1)
    bx = beta_x(s1)
    m = len(log_s1)
    values = np.empty_like(log_s)
    minimizers = np.empty_like(log_s)
    for start in range(0, len(log_s), _ROWS_PER_BLOCK):
        block = log_s[start:start+_ROWS_PER_BLOCK]
        with np.errstate(over="ignore"):
            ratio = np.exp(block[:, None]-log_s1[None, :])
        objective = s1[None, :]*shifted_v(ratio)+bx[None, :]
        best_idx = np.argmin(objective, axis=1)
        for k, (ls, j) in enumerate(zip(block, best_idx)):
            best, best_l = float(objective[k, j]), float(log_s1[j])
            lo, hi = float(log_s1[max(j-1, 0)]), float(log_s1[min(j+1, m-1)])
            s = math.exp(ls)
            res = optimize.minimize_scalar(lambda l, s=s: chain_objective(beta_x, shifted_v, s, math.exp(l)),
                                           bounds=(lo, hi), method="bounded", options={"xatol": 1e-9})
            if res.fun < best:
                best, best_l = float(res.fun), float(res.x)
            values[start+k] = best
            minimizers[start+k] = math.exp(best_l)
    return values, minimizers

class Chained(BetaFn):
    r"""
        The chained function

        .. math::

            \bar\beta(s) = \inf_{s_1 s_2 = s} s_1\,\beta_v(s_2 - c) + \beta_x(s_1),

        where :math:`\beta_v` is shifted by :math:`c` (see :class:`Shifted`).
        The infimum is taken on a log grid of :math:`s_1` with bounded scalar refinement
        around the grid minimiser, on a log grid of :math:`s` from :math:`10^{-6}` to :math:`10^{300}`;
        the minimisers are kept alongside the values.
    """

    _beta_x: BetaFn
    _beta_v: BetaFn
    _shifted: BetaFn
    _c: float
    _log_s: FloatArray
    _log_beta: FloatArray
    _minimizers: FloatArray
    _log_slack: float

    def __new__(cls, beta_x: BetaFn, beta_v: BetaFn, c: float = 0.0, *, per_decade: Optional[int] = None) -> Chained:
        validate(beta_x, BetaFn)
        validate(beta_v, BetaFn)
        validate(c, float)
        validate(per_decade, Optional[int])
        if per_decade is None:
            per_decade = int(get_options()["chain_per_decade"])
        instance = object.__new__(cls)
        instance._beta_x = beta_x
        instance._beta_v = beta_v
        instance._shifted = shift(beta_v, c)
        instance._c = c
        log_s = _log_grid(*_CHAIN_S_RANGE, per_decade)
        log_s1 = _log_grid(*_CHAIN_S1_RANGE, per_decade)
        values, minimizers = _minimize_chain(beta_x, instance._shifted, log_s, log_s1)
        values = np.maximum(np.minimum.accumulate(values), _TINY)
        instance._log_s = log_s
        instance._log_beta = np.log(values)
        instance._minimizers = minimizers
        instance._log_slack = _measure_slack(instance, log_s)
        _log.debug("Chained beta tabulated on %d points, value %g at s = %g", len(log_s), values[0], math.exp(log_s[0]))
        return instance

    @property
    def beta_x(self) -> BetaFn:
        r""" The spatial function. """
        return self._beta_x

    @property
    def beta_v(self) -> BetaFn:
        r""" The (unshifted) velocity function. """
        return self._beta_v

    @property
    def shifted_v(self) -> BetaFn:
        r""" The velocity function shifted by :attr:`c`. """
        return self._shifted

    @property
    def c(self) -> float:
        r""" The shift of the velocity function. """
        return self._c

    @property
    def grid(self) -> FloatArray:
        r""" The tabulation grid in :math:`s`. """
        return np.exp(self._log_s)

    @property
    def values(self) -> FloatArray:
        r""" The tabulated values, floored at :math:`10^{-300}`. """
        return np.exp(self._log_beta)

    @property
    def minimizers(self) -> FloatArray:
        r""" The minimising :math:`s_1^*` at each grid point. """
        return self._minimizers.copy()

    @property
    def interp_slack(self) -> float:
        r""" Factor, at least 1, by which the log-linear interpolant is raised between grid points. """
        return math.exp(self._log_slack)

    def _interpolated(self, s: FloatArray) -> FloatArray:
        return np.exp(np.interp(np.log(np.maximum(s, _TINY)), self._log_s, self._log_beta))

    def _eval(self, s: FloatArray) -> FloatArray:
        log_s = np.log(np.maximum(s, _TINY))
        log_beta = np.interp(log_s, self._log_s, self._log_beta)
        out = np.exp(_left_node_cap(self._log_s, self._log_beta, log_s, log_beta, self._log_slack))
        below = s < math.exp(self._log_s[0])
        if np.any(below):
            out[below] = [self.exact(float(x)) for x in s[below]]
        return out

    def exact(self, s: float) -> float:
        r""" Direct minimisation at ``s`` on a 20-per-decade grid of :math:`s_1`, with refinement. """
        if s <= 0.0:
            return self.at_zero()
        log_s1 = _log_grid(*_CHAIN_S1_RANGE, 20)
        values, _ = _minimize_chain(self._beta_x, self._shifted, np.array([math.log(s)]), log_s1)
        return max(float(values[0]), _TINY)

    def at_zero(self) -> float:
        # splits with s1 -> 0 bound the infimum
        return self._beta_x.at_zero()

    def describe(self) -> Dict[str, Any]:
        return {"kind": "chained", "c": self._c, "beta_x": self._beta_x.describe(), "beta_v": self._beta_v.describe()}

def shift(beta: BetaFn, c: float) -> BetaFn:
    r"""
        Shifts a weak Poincaré function by :math:`c\geq 0`; the zero shift returns ``beta`` itself.

        >>> b = shift(Poly(1.0, 1.0), 1.0)
        >>> float(b(9.0)), float(b(0.5))
        (0.125, 0.25)
    """
    validate(beta, BetaFn)
    validate(c, float)
    if c == 0.0:
        return beta
    return Shifted(beta, c)

def chain(beta_x: BetaFn, beta_v: BetaFn, c: float = 0.0) -> Chained:
    r"""
        Chains a spatial and a velocity weak Poincaré function, see :class:`Chained`.
    """
    if not 0.0 <= c < math.inf:
        raise ConfigurationError(f"Error chaining betas: shift must be non-negative and finite (found {c!r}).")
    return Chained(beta_x, beta_v, c)

__all__ = ("BetaFn", "Poly", "StretchedExp", "Tail", "Shifted", "Scaled", "Chained", "shift", "chain",
           "chain_objective")
