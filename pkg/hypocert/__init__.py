"""
    Certified convergence rates for weakly confined kinetic Langevin dynamics, with a verification harness.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

__version__ = "0.1.0"

from .model import Model, make_benchmark, validate_assumptions, HypocertError
from .rates import RateCertificate, certify, table1_exponent
from .scenario import Scenario, parse_scenario, scenario_id
from .solver import make_grid, run_decay

# explicit re-exports
__all__ = ["Model", "make_benchmark", "validate_assumptions", "HypocertError", "RateCertificate", "certify",
           "table1_exponent", "Scenario", "parse_scenario", "scenario_id", "make_grid", "run_decay"]
