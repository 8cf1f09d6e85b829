"""
    Explicit constants of the hypocoercive estimates: weighted Poincaré–Lions, averaging lemma and algebraic envelopes.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

from ._spatial import (SpatialConstants, compute_Zw, compute_Rwtau, compute_C0_C1, compute_C_Lions,
                       compute_spatial_constants)
from ._averaging import VelocityMoments, AveragingConstants, compute_velocity_moments, compute_averaging_constants
from ._theorem1 import WeightedCase, WeightedRateConstants, invert_increasing, compute_theorem1_constants

__all__ = ("SpatialConstants", "compute_Zw", "compute_Rwtau", "compute_C0_C1", "compute_C_Lions",
           "compute_spatial_constants", "VelocityMoments", "AveragingConstants", "compute_velocity_moments",
           "compute_averaging_constants", "WeightedCase", "WeightedRateConstants", "invert_increasing",
           "compute_theorem1_constants")
