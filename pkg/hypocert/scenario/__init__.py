"""
    Scenario documents: canonical JSON, object paths for diagnostics, and content identifiers.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

from .err import ScenarioError, ScenarioDecodingError, ScenarioEncodingError
from ._path import JSONScalar, JSONValue, PathSegment, ScenarioPath
from ._codec import canonical_order_dict, encode, decode, content_id
from ._scenario import (SCHEMA_VERSION, POTENTIAL_PARAM_KEYS, KINETIC_PARAM_KEYS, ModelSpec, SolverSettings,
                        McSettings, Scenario, scenario_id, parse_scenario)

__all__ = ("ScenarioError", "ScenarioDecodingError", "ScenarioEncodingError",
           "JSONScalar", "JSONValue", "PathSegment", "ScenarioPath",
           "canonical_order_dict", "encode", "decode", "content_id",
           "SCHEMA_VERSION", "POTENTIAL_PARAM_KEYS", "KINETIC_PARAM_KEYS",
           "ModelSpec", "SolverSettings", "McSettings", "Scenario", "scenario_id", "parse_scenario")
