r"""
    Errors for the :mod:`hypocert.scenario` submodule.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

from ..model.err import HypocertError

class ScenarioError(HypocertError, ValueError):
    """
        Parent class for errors in scenario documents, carrying the object path of the offending value in its message.
    """

class ScenarioDecodingError(ScenarioError):
    """
        Class for documents which are not valid JSON, or whose values have the wrong kind or range.
    """

class ScenarioEncodingError(ScenarioError):
    """
        Class for values which cannot be emitted canonically (non-finite floats, non-string keys, foreign types).
    """
