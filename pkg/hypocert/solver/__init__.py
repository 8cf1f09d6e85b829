"""
    Verification harness: finite-volume solver on the phase plane, particle ensembles, and decay audits.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

from .err import SolverError, CFLError, InstabilityError, NonFiniteStateError
from ._grid import InitialDatum, Stretch, PhaseGrid, axis_cells, make_grid, datum_factors, initial_field
from ._pde import Discretization, DensityField, step_pde, DecaySeries, windowed, run_decay
from ._sde import (BLOCK_SIZE, SdeEnsemble, sample_gibbs, init_ensemble, step_sde, run_ensemble, centred_datum,
                   McSeries, jackknife, estimate_observable_decay)
from ._diagnostics import (DiscretizationBudget, richardson_budget, WeakDissipationReport, weak_dissipation_check,
                           DominationReport, domination_check, CrossValidationReport, cross_validate)

__all__ = ("SolverError", "CFLError", "InstabilityError", "NonFiniteStateError",
           "InitialDatum", "Stretch", "PhaseGrid", "axis_cells", "make_grid", "datum_factors", "initial_field",
           "Discretization", "DensityField", "step_pde", "DecaySeries", "windowed", "run_decay",
           "BLOCK_SIZE", "SdeEnsemble", "sample_gibbs", "init_ensemble", "step_sde", "run_ensemble", "centred_datum",
           "McSeries", "jackknife", "estimate_observable_decay",
           "DiscretizationBudget", "richardson_budget", "WeakDissipationReport", "weak_dissipation_check",
           "DominationReport", "domination_check", "CrossValidationReport", "cross_validate")
