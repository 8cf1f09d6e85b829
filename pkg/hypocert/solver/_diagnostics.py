r"""
    Audits of decay runs: Richardson discretisation budgets, the weak dissipation inequality, envelope domination
    and the agreement between the finite-volume solver and the particle estimate.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

from dataclasses import dataclass
import logging
import math
from typing import Any, Dict, Optional

import numpy as np
from typing_validation import validate

from ..model import FloatArray, Model
from ..rates import RateCertificate
from ..weakpi import BetaFn
from ._grid import InitialDatum, PhaseGrid
from ._pde import DecaySeries, Discretization, run_decay
from ._sde import McSeries

_log = logging.getLogger(__name__)

_BUDGET_FACTOR = 3.0
_VACUITY_FACTOR = 10.0

@dataclass(frozen=True)
class DiscretizationBudget:
    r"""
        Error allowances for a decay run: :data:`_BUDGET_FACTOR` times the largest difference from a refined run
        (cells split and time step divided by a power of 2), for :math:`\|h\|^2`, :math:`\mathcal{H}_\tau` and the pairing.
    """

    l2: float
    H_tau: float
    pairing: float
    refinements: int

    @property
    def value(self) -> float:
        r""" The largest of the three allowances. """
        return max(self.l2, self.H_tau, self.pairing)

def _max_diff(a: FloatArray, b: FloatArray) -> float:
    diff = np.abs(a-b)
    diff = diff[np.isfinite(diff)]
    return float(np.max(diff)) if len(diff) else 0.0

def richardson_budget(series: DecaySeries, model: Model, grid: PhaseGrid, gamma: float, *,
                      datum: InitialDatum = "tanh-x", levels: int = 1, stride: int = 1) -> DiscretizationBudget:
    r"""
        Reruns ``series`` on a grid refined ``levels`` times, each time with half the time step (or less, when the
        refined transport step bound requires it), and compares at the common sample times.
    """
    # pylint: disable = too-many-arguments
    validate(levels, int)
    if levels < 1:
        return DiscretizationBudget(0.0, 0.0, 0.0, 0)
    fine = grid
    for _ in range(levels):
        fine = fine.refined(model)
    stable = Discretization(model, fine, gamma).stable_dt()
    factor = 2**levels
    while series.dt/factor > stable:
        factor *= 2
    t_final = float(series.times[-1])
    ref = run_decay(model, fine, gamma, t_final, tau=series.tau, datum=datum, dt=series.dt/factor,
                    stride=stride*factor)
    if len(ref.times) != len(series.times) or not np.allclose(ref.times, series.times, rtol=1e-9, atol=1e-12):
        common = np.interp(series.times, ref.times, ref.l2_sq), np.interp(series.times, ref.times, ref.H_tau), \
                 np.interp(series.times, ref.times, ref.pairing)
    else:
        common = ref.l2_sq, ref.H_tau, ref.pairing
    budget = DiscretizationBudget(_BUDGET_FACTOR*_max_diff(series.l2_sq, common[0]),
                                  _BUDGET_FACTOR*_max_diff(series.H_tau, common[1]),
                                  _BUDGET_FACTOR*_max_diff(series.pairing, common[2]), levels)
    _log.info("Richardson budget from %d refinement(s), time step / %d: %g", levels, factor, budget.value)
    return budget

@dataclass(frozen=True)
class WeakDissipationReport:
    r"""
        Worst margin of :math:`s\mathcal{D}_\tau(t)+\beta(s)\Phi(h_0)+b-\mathcal{H}_\tau(t)` over the checked
        :math:`(t,s)` pairs, where it occurs, and how many pairs were checked or skipped.
    """

    worst_margin: float
    worst_t: float
    worst_s: float
    checked: int
    skipped: int

    @property
    def passed(self) -> bool:
        r""" Whether every checked pair has a non-negative margin. """
        return self.worst_margin >= 0.0

    def to_dict(self) -> Dict[str, Any]:
        r""" A JSON-ready summary. """
        return {"worst_margin": self.worst_margin, "worst_t": self.worst_t, "worst_s": self.worst_s,
                "checked": self.checked, "skipped": self.skipped, "passed": self.passed}

def weak_dissipation_check(series: DecaySeries, beta: BetaFn, oscillation: float, budget: float = 0.0, *,
                           s_grid: Optional[FloatArray] = None) -> WeakDissipationReport:
    r"""
        Audits :math:`\mathcal{H}_\tau(t)\leq s\mathcal{D}_\tau(t)+\beta(s)\Phi(h_0)+b` at every sample with a complete
        window and every :math:`s` on a log grid. Samples where :math:`\mathcal{D}_\tau<10b` are skipped, since there
        the inequality is carried by the budget alone.
    """
    validate(beta, BetaFn)
    s = np.logspace(-3.0, 9.0, 60) if s_grid is None else np.asarray(s_grid, dtype=np.float64)
    complete = np.isfinite(series.H_tau) & np.isfinite(series.D_tau)
    active = complete & ~(series.D_tau < _VACUITY_FACTOR*budget)
    skipped = int(np.count_nonzero(complete & ~active))
    if not np.any(active):
        return WeakDissipationReport(math.inf, math.nan, math.nan, 0, skipped)
    H, D, t = series.H_tau[active], series.D_tau[active], series.times[active]
    beta_s = np.asarray(beta(s), dtype=np.float64)
    margins = s[None, :]*D[:, None]+beta_s[None, :]*oscillation+budget-H[:, None]
    i, j = np.unravel_index(int(np.argmin(margins)), margins.shape)
    report = WeakDissipationReport(float(margins[i, j]), float(t[i]), float(s[j]), int(margins.size), skipped)
    level = logging.INFO if report.passed else logging.WARNING
    _log.log(level, "Weak dissipation audit: worst margin %g at t = %g, s = %g (%d pairs, %d samples skipped)",
             report.worst_margin, report.worst_t, report.worst_s, report.checked, skipped)
    return report

@dataclass(frozen=True)
class DominationReport:
    r"""
        Envelope bound at every sample, which samples satisfy :math:`\|h(t)\|^2\leq N\,\mathsf{F}(t)+b`,
        and the largest excess :math:`\|h(t)\|^2-N\,\mathsf{F}(t)-b` (negative when every sample is dominated).
    """

    bound: FloatArray
    dominated: FloatArray
    worst_excess: float

    @property
    def passed(self) -> bool:
        r""" Whether every sample is dominated. """
        return bool(np.all(self.dominated))

def domination_check(series: DecaySeries, certificate: RateCertificate, budget: float = 0.0) -> DominationReport:
    r"""
        Checks the certified envelope against the simulated :math:`\|h(t)\|^2` at every sample.
    """
    validate(certificate, RateCertificate)
    bound = np.asarray(certificate.bound(series.times), dtype=np.float64)
    excess = series.l2_sq-bound-budget
    dominated = excess <= 0.0
    worst = float(np.max(excess)) if len(excess) else -math.inf
    if not np.all(dominated):
        k = int(np.argmax(excess))
        _log.warning("Envelope violated at t = %g: |h|^2 = %g > %g + budget %g",
                     series.times[k], series.l2_sq[k], bound[k], budget)
    return DominationReport(bound, dominated, worst)

@dataclass(frozen=True)
class CrossValidationReport:
    r"""
        Largest excess of :math:`|\hat c(t)-\langle h_0,h(t)\rangle_\Theta|` over :math:`3\sigma+b` on the common times.
    """

    times: FloatArray
    difference: FloatArray
    allowance: FloatArray
    worst_excess: float

    @property
    def passed(self) -> bool:
        r""" Whether the particle estimate agrees with the solver at every common time. """
        return self.worst_excess <= 0.0

def cross_validate(series: DecaySeries, mc: McSeries, budget: float = 0.0, *,
                   t_max: Optional[float] = None) -> CrossValidationReport:
    r"""
        Compares the particle autocovariance with the solver pairing, interpolated at the particle sample times
        up to ``t_max`` (default: the end of the shorter run).
    """
    t_end = min(float(series.times[-1]), float(mc.times[-1]))
    if t_max is not None:
        t_end = min(t_end, t_max)
    keep = mc.times <= t_end*(1.0+1e-12)
    times = mc.times[keep]
    pde = np.interp(times, series.times, series.pairing)
    difference = np.abs(mc.c_hat[keep]-pde)
    allowance = 3.0*mc.stderr[keep]+budget
    worst = float(np.max(difference-allowance)) if len(times) else -math.inf
    _log.info("Cross-validation on %d times: worst excess %g", len(times), worst)
    return CrossValidationReport(times, difference, allowance, worst)

__all__ = ("DiscretizationBudget", "richardson_budget", "WeakDissipationReport", "weak_dissipation_check",
           "DominationReport", "domination_check", "CrossValidationReport", "cross_validate")
