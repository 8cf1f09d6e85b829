r"""
    Errors for the :mod:`hypocert.solver` submodule.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

from ..model.err import HypocertError

class SolverError(HypocertError):
    """
        Parent class for errors raised while evolving the kinetic equation or the particle ensemble.
    """

class CFLError(SolverError, ValueError):
    """
        Class for time steps exceeding the stability bound of the explicit transport step.
    """

class InstabilityError(SolverError):
    """
        Class for runs in which the discrete :math:`L^2` energy increases beyond tolerance.
    """

class NonFiniteStateError(SolverError):
    """
        Class for particle states which become NaN or infinite.
    """
