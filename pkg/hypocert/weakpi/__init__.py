"""
    Weak Poincaré calculus: beta functions and their algebra, convex conjugates and rate functions.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

from .err import WeakPIError, InvalidKStarError, ShiftThresholdError
from ._options import options, set_options, reset_options, default_options, get_options
from ._beta import BetaFn, Poly, StretchedExp, Tail, Shifted, Scaled, Chained, shift, chain, chain_objective
from ._legendre import (KStar, legendre_kstar, conjugate_objective, RateFunction, rate_function,
                        beta_threshold, kstar_shift_bound)
from ._kinetic import (beta_weighted, beta_tail_x, beta_overdamped, beta_velocity, chain_constant, beta_kin,
                       beta_appendix_a)

__all__ = ("WeakPIError", "InvalidKStarError", "ShiftThresholdError",
           "options", "set_options", "reset_options", "default_options", "get_options",
           "BetaFn", "Poly", "StretchedExp", "Tail", "Shifted", "Scaled", "Chained", "shift", "chain", "chain_objective",
           "KStar", "legendre_kstar", "conjugate_objective", "RateFunction", "rate_function",
           "beta_threshold", "kstar_shift_bound",
           "beta_weighted", "beta_tail_x", "beta_overdamped", "beta_velocity", "chain_constant", "beta_kin",
           "beta_appendix_a")
