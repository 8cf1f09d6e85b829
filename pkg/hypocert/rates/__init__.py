"""
    Rate certificates: algebraic and weak Poincaré envelopes, and the symbolic classification of decay rates.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

from ._exponents import (ExponentKind, ExponentClass, table1_exponent, model_exponent, overdamped_exponent,
                         fit_exponent)
from ._certificate import (Regime, NormalizerKind, Envelope, RateCertificate, model_constants, constants_record,
                           certify_thm1, certify_thm3, certify_appendixA, certify_overdamped, certify,
                           pointwise_min, optimize_tau)

__all__ = ("ExponentKind", "ExponentClass", "table1_exponent", "model_exponent", "overdamped_exponent", "fit_exponent",
           "Regime", "NormalizerKind", "Envelope", "RateCertificate", "model_constants", "constants_record",
           "certify_thm1", "certify_thm3", "certify_appendixA", "certify_overdamped", "certify",
           "pointwise_min", "optimize_tau")
