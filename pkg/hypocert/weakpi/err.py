r"""
    Errors for the :mod:`hypocert.weakpi` submodule.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

from ..model.err import HypocertError

class WeakPIError(HypocertError):
    """
        Parent class for errors in the weak Poincaré calculus.
    """

class InvalidKStarError(WeakPIError, ValueError):
    """
        Class for Legendre transforms which are not positive and finite on the tabulated range,
        so that no rate function can be built from them.
    """

class ShiftThresholdError(WeakPIError, ValueError):
    """
        Class for shift bounds requested for a beta function which never drops to 1/8.
    """
