r"""
    Convex conjugates :math:`K^*` of :math:`K(u)=u\beta(1/u)`, the rate functions

    .. math::

        F_a(z) = \int_z^a \frac{dw}{K^*(w)}

    and their inverses, together with the bound on conjugates of shifted functions.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

import logging
import math
from typing import Optional, Tuple

import numpy as np
import numpy.typing as npt
from scipy import optimize, special
from typing_validation import validate

from ..model import ConfigurationError, FloatArray
from .err import InvalidKStarError, ShiftThresholdError
from ._beta import BetaFn, Poly
from ._options import get_options

_log = logging.getLogger(__name__)

_KSTAR_FLOOR = 1e-290
_U_CAP = 1e300
_ROWS_PER_BLOCK = 128

class KStar:
    r"""
        Tabulation of :math:`K^*` on a log grid of :math:`(0, a]`, interpolated as a piecewise power law.

        Below the smallest node the first segment is continued with log-log slope at least 1,
        which keeps :math:`K^*(w)/w` nondecreasing.
    """

    _w: FloatArray
    _values: FloatArray
    _a: float
    _closed_form: Optional[Tuple[float, float]]

    def __new__(cls, w: FloatArray, values: FloatArray, a: float, *,
                closed_form: Optional[Tuple[float, float]] = None) -> KStar:
        w = np.asarray(w, dtype=np.float64)
        values = np.asarray(values, dtype=np.float64)
        if w.ndim != 1 or w.shape != values.shape or len(w) < 2:
            raise ConfigurationError("Error constructing K* tabulation: need matching 1-D arrays of length at least 2.")
        if np.any(np.diff(w) <= 0.0):
            raise ConfigurationError("Error constructing K* tabulation: nodes must be strictly increasing.")
        if not np.all(np.isfinite(values)) or np.any(values <= 0.0):
            bad = int(np.argmin(np.where(np.isfinite(values), values, -np.inf)))
            raise InvalidKStarError(f"Error constructing K* tabulation at w = {w[bad]:g}: value {values[bad]!r} "
                                    f"is not positive and finite.")
        instance = object.__new__(cls)
        instance._w = w
        instance._values = values
        instance._a = float(a)
        instance._closed_form = closed_form
        return instance

    @property
    def a(self) -> float:
        r""" Upper end of the tabulated range. """
        return self._a

    @property
    def w(self) -> FloatArray:
        r""" Tabulation nodes, increasing. """
        return self._w.copy()

    @property
    def values(self) -> FloatArray:
        r""" Values of :math:`K^*` at the nodes. """
        return self._values.copy()

    @property
    def closed_form(self) -> Optional[Tuple[float, float]]:
        r""" Coefficient and power of a known closed form :math:`c\,w^k`, if any. """
        return self._closed_form

    @property
    def slopes(self) -> FloatArray:
        r""" Log-log slopes of the segments between consecutive nodes. """
        return np.diff(np.log(self._values))/np.diff(np.log(self._w))

    @property
    def extension_slope(self) -> float:
        r""" Log-log slope used below the smallest node. """
        return max(float(self.slopes[0]), 1.0)

    def __call__(self, w: npt.ArrayLike) -> FloatArray:
        w = np.asarray(w, dtype=np.float64)
        out = np.zeros_like(w)
        pos = w > 0.0
        log_w = np.log(np.minimum(w[pos], self._a))
        log_nodes, log_vals = np.log(self._w), np.log(self._values)
        inner = np.exp(np.interp(log_w, log_nodes, log_vals))
        below = log_w < log_nodes[0]
        inner[below] = np.exp(log_vals[0]+self.extension_slope*(log_w[below]-log_nodes[0]))
        out[pos] = inner
        return out

    def __repr__(self) -> str:
        return f"KStar(a={self._a!r}, nodes={len(self._w)}, w_min={self._w[0]:g})"

def _w_grid(a: float, w_floor: float) -> FloatArray:
    opts = get_options()
    fine_decades = int(opts["w_fine_decades"])
    fine = a*10.0**(-np.arange(fine_decades*int(opts["w_fine_per_decade"])+1)/opts["w_fine_per_decade"])
    coarse_top = fine[-1]
    decades = max(math.log10(coarse_top/w_floor), 0.0)
    num = int(math.ceil(decades*int(opts["w_coarse_per_decade"])))
    coarse = coarse_top*10.0**(-np.arange(1, num+1)/opts["w_coarse_per_decade"])
    grid = np.concatenate([fine, coarse])
    return np.sort(grid[grid >= w_floor*(1.0-1e-12)])

def _u_range(beta: BetaFn, a: float, w_floor: float) -> Tuple[float, float, float]:
    def objective(u: float) -> float:
        return u*(a-beta.at(1.0/u))
    # objective is concave in u: grow until it decreases
    u_hi, prev = 1.0, objective(1.0)
    while True:
        nxt = objective(2.0*u_hi)
        if nxt < prev:
            break
        u_hi, prev = 2.0*u_hi, nxt
        if u_hi > _U_CAP:
            raise InvalidKStarError(f"Error computing K* of {beta!r}: conjugate is infinite at w = {a:g}.")
    u_hi *= 2.0
    s = 1.0
    while beta.at(s) >= w_floor*1e-3 and s < 1e300:
        s *= 10.0
    tail = beta.at(s)
    if tail >= w_floor*1e-3:
        w_floor = tail*1e3
        if w_floor >= a*1e-3:
            raise InvalidKStarError(f"Error computing K* of {beta!r}: beta stays above {tail:g} up to s = 1e300.")
        _log.info("Raising K* floor to %g: beta decays slowly, beta(1e300) = %g", w_floor, tail)
    return min(1.0/s, u_hi/10.0), u_hi, w_floor

def conjugate_objective(beta: BetaFn, w: float, u: float) -> float:
    r""" The Legendre objective :math:`uw - K(u) = u(w - \beta(1/u))`. """
    return u*(w-beta.at(1.0/u))

def legendre_kstar(beta: BetaFn, a: Optional[float] = None, *, w_floor: Optional[float] = None) -> KStar:
    r"""
        Tabulates the convex conjugate :math:`K^*(w)=\sup_{u\geq 0}(uw-K(u))` of :math:`K(u)=u\beta(1/u)` on :math:`(0,a]`.

        For each node the supremum is located on a log grid of :math:`u` (about 20 points per decade)
        and refined by bounded scalar maximisation between the neighbours of the grid maximiser.
        The :math:`w` grid is dense in the first decades below :math:`a` and coarser down to ``w_floor``;
        nodes where :math:`K^*` underflows are dropped.

        >>> kstar = legendre_kstar(Poly(1.0, 1.0))
        >>> abs(float(kstar(0.1))/0.0025-1.0) < 1e-4
        True

        :raises InvalidKStarError: if the conjugate is infinite at :math:`a` or not positive on the grid
    """
    # pylint: disable = too-many-locals
    validate(beta, BetaFn)
    validate(a, Optional[float])
    validate(w_floor, Optional[float])
    opts = get_options()
    if a is None:
        a = float(opts["a"])
    if w_floor is None:
        w_floor = float(opts["w_floor"])
    if not 0.0 < a <= 0.25:
        raise ConfigurationError(f"Error computing K*: a must lie in (0, 1/4] (found {a!r}).")
    u_lo, u_hi, w_floor = _u_range(beta, a, w_floor)
    per_decade = int(opts["u_per_decade"])
    log_u = np.linspace(math.log(u_lo), math.log(u_hi),
                        int(math.ceil(math.log10(u_hi/u_lo)*per_decade))+1)
    u = np.exp(log_u)
    beta_u = beta(1.0/u)
    w = _w_grid(a, w_floor)
    values = np.empty_like(w)
    m = len(u)
    for start in range(0, len(w), _ROWS_PER_BLOCK):
        block = w[start:start+_ROWS_PER_BLOCK]
        objective = u[None, :]*(block[:, None]-beta_u[None, :])
        best_idx = np.argmax(objective, axis=1)
        for k, (wk, j) in enumerate(zip(block, best_idx)):
            best = float(objective[k, j])
            lo, hi = float(log_u[max(j-1, 0)]), float(log_u[min(j+1, m-1)])
            res = optimize.minimize_scalar(lambda l, wk=wk: -conjugate_objective(beta, float(wk), math.exp(l)),
                                           bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
            values[start+k] = max(best, -float(res.fun))
    keep = values >= _KSTAR_FLOOR
    if not np.any(keep):
        raise InvalidKStarError(f"Error computing K* of {beta!r}: conjugate underflows on the whole grid.")
    first = int(np.argmax(keep))
    if np.any(values[first:] <= 0.0):
        bad = first+int(np.argmin(values[first:]))
        raise InvalidKStarError(f"Error computing K* of {beta!r} at w = {w[bad]:g}: value {values[bad]!r} is not positive.")
    w, values = w[first:], values[first:]
    _log.debug("K* of %r tabulated on %d nodes in [%g, %g], u in [%g, %g]", beta, len(w), w[0], w[-1], u_lo, u_hi)
    closed_form = beta.kstar_closed_form() if isinstance(beta, Poly) else None
    return KStar(w, values, a, closed_form=closed_form)

class RateFunction:
    r"""
        The decreasing function :math:`F_a(z)=\int_z^a dw/K^*(w)` and its inverse :math:`F_a^{-1}:[0,\infty)\to(0,a]`.

        With :math:`K^*` a piecewise power law, each segment integral is closed form, and so is the inverse within
        a segment: round trips are exact up to rounding. :math:`F_a(z)=0` for :math:`z\geq a` and
        :math:`F_a^{-1}(t)=a` for :math:`t\leq 0`.
    """

    _kstar: KStar
    _a: float
    _w: FloatArray
    _k: FloatArray
    _slopes: FloatArray
    _F: FloatArray

    def __new__(cls, kstar: KStar, a: Optional[float] = None) -> RateFunction:
        validate(kstar, KStar)
        validate(a, Optional[float])
        if a is None:
            a = kstar.a
        if not 0.0 < a <= 0.25:
            raise ConfigurationError(f"Error constructing rate function: a must lie in (0, 1/4] (found {a!r}).")
        if a > kstar.a*(1.0+1e-12):
            raise ConfigurationError(f"Error constructing rate function: a = {a!r} exceeds the K* range {kstar.a!r}.")
        w = kstar.w
        w = w[w < a*(1.0-1e-12)]
        w = np.append(w, a)
        k = kstar(w)
        if np.any(k <= 0.0) or not np.all(np.isfinite(k)):
            raise InvalidKStarError("Error constructing rate function: K* is not positive and finite on (0, a].")
        log_ratio = np.diff(np.log(w))
        slopes = np.diff(np.log(k))/log_ratio
        with np.errstate(over="ignore"):
            pieces = (w[:-1]/k[:-1])*log_ratio*special.exprel((1.0-slopes)*log_ratio)
            F = np.append(np.cumsum(pieces[::-1])[::-1], 0.0)
        finite = np.isfinite(F) & (F < 1e300)
        first = int(np.argmax(finite))
        instance = object.__new__(cls)
        instance._kstar = kstar
        instance._a = float(a)
        instance._w = w[first:]
        instance._k = k[first:]
        instance._slopes = slopes[first:]
        instance._F = F[first:]
        _log.debug("Rate function with a = %g tabulated up to t = %g", a, instance._F[0])
        return instance

    @property
    def a(self) -> float:
        r""" Upper end :math:`a`. """
        return self._a

    @property
    def kstar(self) -> KStar:
        r""" The underlying conjugate. """
        return self._kstar

    @property
    def nodes(self) -> Tuple[FloatArray, FloatArray]:
        r""" Nodes :math:`w_i` and values :math:`F_a(w_i)`. """
        return self._w.copy(), self._F.copy()

    @property
    def t_max(self) -> float:
        r""" Largest time covered by the tabulation; the inverse extrapolates beyond it. """
        return float(self._F[0])

    def _segment(self, idx: npt.NDArray[np.intp]) -> Tuple[FloatArray, FloatArray, FloatArray, FloatArray]:
        # upper node, value at the upper node, slope and F at the upper node for segment index idx;
        # index -1 is the extension below the smallest node
        ext = max(float(self._slopes[0]), 1.0)
        upper = np.where(idx < 0, 0, idx+1)
        slopes = np.where(idx < 0, ext, self._slopes[np.maximum(idx, 0)])
        return self._w[upper], self._k[upper], slopes, self._F[upper]

    def __call__(self, z: npt.ArrayLike) -> FloatArray:
        z = np.asarray(z, dtype=np.float64)
        out = np.zeros_like(z)
        active = (z > 0.0) & (z < self._a)
        zs = z[active]
        idx = np.searchsorted(self._w, zs, side="right")-1
        b, kb, slope, fb = self._segment(idx)
        log_ratio = np.log(b/zs)
        kz = kb*np.exp(-slope*log_ratio)
        with np.errstate(over="ignore"):
            out[active] = fb+(zs/kz)*log_ratio*special.exprel((1.0-slope)*log_ratio)
        out[z <= 0.0] = math.inf
        return out

    def inverse(self, t: npt.ArrayLike) -> FloatArray:
        r"""
            Evaluates :math:`F_a^{-1}(t)`, nonincreasing with limit 0 as :math:`t\to\infty`.
        """
        t = np.asarray(t, dtype=np.float64)
        out = np.full_like(t, self._a)
        active = t > 0.0
        ts = t[active]
        # F is decreasing along the increasing nodes
        idx = len(self._F)-1-np.searchsorted(self._F[::-1], ts, side="left")
        b, kb, slope, fb = self._segment(idx)
        q = ts-fb
        one_minus = 1.0-slope
        with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
            arg = np.maximum(-one_minus*q*kb/b, -1.0+1e-16)
            general = b*np.exp(np.log1p(arg)/one_minus)
            linear = b*np.exp(-q*kb/b)
        out[active] = np.where(np.abs(one_minus) > 1e-12, general, linear)
        return out

    def __repr__(self) -> str:
        return f"RateFunction(a={self._a!r}, t_max={self.t_max:g})"

def rate_function(kstar: KStar, a: Optional[float] = None) -> RateFunction:
    r"""
        Builds the rate function :math:`F_a` of a tabulated conjugate, see :class:`RateFunction`.

        >>> F = rate_function(legendre_kstar(Poly(1.0, 1.0)))
        >>> abs(float(F.inverse(84.0))/0.04-1.0) < 1e-4
        True

        :raises InvalidKStarError: if :math:`K^*\leq 0` somewhere on :math:`(0,a]`
    """
    return RateFunction(kstar, a)

def beta_threshold(beta: BetaFn, level: float = 0.125) -> float:
    r"""
        The smallest :math:`s` with :math:`\beta(s)\leq` ``level``, by bisection in :math:`\log s`.

        :raises ShiftThresholdError: if :math:`\beta` stays above the level up to :math:`s=10^{300}`
    """
    lo, hi = math.log(1e-300), math.log(1e300)
    if beta.at(math.exp(hi)) > level:
        raise ShiftThresholdError(f"Error bounding shifted conjugate of {beta!r}: beta never drops to {level:g}.")
    if beta.at(math.exp(lo)) <= level:
        return 0.0
    for _ in range(200):
        mid = 0.5*(lo+hi)
        if beta.at(math.exp(mid)) <= level:
            hi = mid
        else:
            lo = mid
        if hi-lo < 1e-14:
            break
    return math.exp(hi)

def kstar_shift_bound(beta: BetaFn, c: float) -> float:
    r"""
        The constant :math:`\tilde c = (1+c\bar w)^{-1}`, with :math:`\bar w = \sup\{u : \beta(1/u)\leq 1/8\}`,
        such that the conjugate of the function shifted by :math:`c` satisfies
        :math:`\tilde K^*(u)\geq \tilde c\,K^*(u)` on :math:`(0, 1/8)`.

        >>> round(kstar_shift_bound(Poly(1.0, 1.0), 1.0), 12)
        0.888888888889

        :raises ShiftThresholdError: if :math:`\beta` never drops to 1/8
    """
    validate(beta, BetaFn)
    validate(c, float)
    if not 0.0 <= c < math.inf:
        raise ConfigurationError(f"Error bounding shifted conjugate: shift must be non-negative (found {c!r}).")
    s_star = beta_threshold(beta)
    if c == 0.0:
        return 1.0
    if s_star == 0.0:
        return 0.0
    return 1.0/(1.0+c/s_star)

__all__ = ("KStar", "legendre_kstar", "conjugate_objective", "RateFunction", "rate_function",
           "beta_threshold", "kstar_shift_bound")
