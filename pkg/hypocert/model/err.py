r"""
    Errors for the :mod:`hypocert.model` submodule, and the root of the error hierarchy.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

from typing import Optional, Tuple

class HypocertError(Exception):
    """
        Parent class for all errors raised by the library.
    """

class ConfigurationError(HypocertError, ValueError):
    """
        Class for errors due to missing or incompatible inputs, e.g. a certificate requested
        for a velocity inequality which the kinetic energy does not provide.
    """

class ModelError(HypocertError):
    """
        Parent class for errors in the evaluation of a model (potential, kinetic energy, weights).
    """

class QuadratureError(ModelError):
    """
        Class for quadrature failures. The last bracket on which the integral was being
        refined is available as :attr:`bracket`, the partial estimate as :attr:`estimate`.
    """

    bracket: Tuple[float, float]
    estimate: Optional[float]

    def __init__(self, msg: str, bracket: Tuple[float, float], estimate: Optional[float] = None) -> None:
        super().__init__(msg)
        self.bracket = bracket
        self.estimate = estimate

class AssumptionError(ModelError):
    """
        Class for models failing the structural assumptions required by the certificates.
        The failing report is available as :attr:`report`.
    """

    report: object

    def __init__(self, msg: str, report: object) -> None:
        super().__init__(msg)
        self.report = report
