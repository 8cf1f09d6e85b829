"""
    Benchmark potentials, kinetic energies and weights, their equilibrium measures, and adaptive quadrature.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

from .err import HypocertError, ConfigurationError, ModelError, QuadratureError, AssumptionError
from ._quadrature import (QuadratureCfg, DEFAULT_QUADRATURE, Measure, lebesgue, integrate, tail_masses,
                          sphere_area, FloatArray)
from ._energies import PotentialKind, KineticKind, bracket, RadialEnergy, Potential, Kinetic
from ._weights import (Provenance, Weight, muckenhoupt_bound, BetaKind, BetaDescriptor,
                       VelocityInequalityKind, VelocityInequality)
from ._chang_cooper import (cell_masses, conductances, symmetric_generator, implicit_banded,
                            uniform_cells, spectral_gap)
from ._benchmarks import (Model, make_benchmark, AssumptionCheck, AssumptionReport, validate_assumptions,
                          validation_grid)

__all__ = ("HypocertError", "ConfigurationError", "ModelError", "QuadratureError", "AssumptionError",
           "QuadratureCfg", "DEFAULT_QUADRATURE", "Measure", "lebesgue", "integrate", "tail_masses", "sphere_area",
           "FloatArray", "PotentialKind", "KineticKind", "bracket", "RadialEnergy", "Potential", "Kinetic",
           "Provenance", "Weight", "muckenhoupt_bound", "BetaKind", "BetaDescriptor",
           "VelocityInequalityKind", "VelocityInequality",
           "cell_masses", "conductances", "symmetric_generator", "implicit_banded", "uniform_cells", "spectral_gap",
           "Model", "make_benchmark", "AssumptionCheck", "AssumptionReport", "validate_assumptions", "validation_grid")
