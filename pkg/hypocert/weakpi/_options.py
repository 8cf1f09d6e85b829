"""
    Process-wide tabulation options for the weak Poincaré calculus.
"""
# pylint: disable = global-statement

from __future__ import annotations # See https://peps.python.org/pep-0563/

from contextlib import contextmanager
import math
from types import MappingProxyType
from typing import Any, Dict, Iterator, Mapping, Optional
from typing_validation import validate

from ..model import ConfigurationError

_default_options: Dict[str, Any] = {
    "a": 0.25,
    "w_floor": 1e-280,
    "u_per_decade": 20,
    "w_fine_per_decade": 40,
    "w_fine_decades": 6,
    "w_coarse_per_decade": 10,
    "tail_points": 200,
    "chain_per_decade": 4,
}

_options = _default_options

def reset_options() -> None:
    """
        Resets tabulation options to their default values.
    """
    global _options
    _options = _default_options

def default_options() -> Mapping[str, Any]:
    """
        Readonly view of the default tabulation options.
    """
    return MappingProxyType(_default_options)

def get_options() -> Mapping[str, Any]:
    """
        Readonly view of the current tabulation options.
    """
    return MappingProxyType(_options)

@contextmanager
def options(*,
            a: Optional[float] = None,
            w_floor: Optional[float] = None,
            u_per_decade: Optional[int] = None,
            w_fine_per_decade: Optional[int] = None,
            w_fine_decades: Optional[int] = None,
            w_coarse_per_decade: Optional[int] = None,
            tail_points: Optional[int] = None,
            chain_per_decade: Optional[int] = None) -> Iterator[None]:
    """
        Returns with-statement context manager for temporary option setting:

        .. code-block:: python

            with options(a=0.125):
                rate = rate_function(legendre_kstar(beta))

        Options available:

        .. code-block::

            a: float                  # upper end of the rate function, in (0, 1/4]
            w_floor: float            # smallest w at which K* is tabulated
            u_per_decade: int         # density of the u grid in the Legendre maximisation
            w_fine_per_decade: int    # density of the w grid just below a
            w_fine_decades: int       # number of decades tabulated at the fine density
            w_coarse_per_decade: int  # density of the w grid further down
            tail_points: int          # number of nodes in tail tabulations
            chain_per_decade: int     # density of the s grids in chaining
    """
    # pylint: disable = too-many-arguments
    global _options
    _old_options = _options
    try:
        set_options(a=a, w_floor=w_floor, u_per_decade=u_per_decade,
                    w_fine_per_decade=w_fine_per_decade, w_fine_decades=w_fine_decades,
                    w_coarse_per_decade=w_coarse_per_decade, tail_points=tail_points,
                    chain_per_decade=chain_per_decade)
        yield
    finally:
        _options = _old_options

def set_options(*,
                a: Optional[float] = None,
                w_floor: Optional[float] = None,
                u_per_decade: Optional[int] = None,
                w_fine_per_decade: Optional[int] = None,
                w_fine_decades: Optional[int] = None,
                w_coarse_per_decade: Optional[int] = None,
                tail_points: Optional[int] = None,
                chain_per_decade: Optional[int] = None) -> None:
    """
        Permanently sets tabulation options. See :func:`options` for the available options.
    """
    # pylint: disable = too-many-arguments, too-many-branches
    for farg in (a, w_floor):
        validate(farg, Optional[float])
    for iarg in (u_per_decade, w_fine_per_decade, w_fine_decades, w_coarse_per_decade, tail_points, chain_per_decade):
        validate(iarg, Optional[int])
    global _options
    _new_options: Dict[str, Any] = {}
    if a is not None:
        if not 0.0 < a <= 0.25:
            raise ConfigurationError(f"Value for a must lie in (0, 1/4], found {a!r}.")
        _new_options["a"] = a
    if w_floor is not None:
        if not 0.0 < w_floor < 1e-6 or math.isnan(w_floor):
            raise ConfigurationError(f"Value for w_floor must lie in (0, 1e-6), found {w_floor!r}.")
        _new_options["w_floor"] = w_floor
    if u_per_decade is not None:
        if u_per_decade < 4:
            raise ConfigurationError("Value for u_per_decade must be at least 4.")
        _new_options["u_per_decade"] = u_per_decade
    if w_fine_per_decade is not None:
        if w_fine_per_decade < 2:
            raise ConfigurationError("Value for w_fine_per_decade must be at least 2.")
        _new_options["w_fine_per_decade"] = w_fine_per_decade
    if w_fine_decades is not None:
        if w_fine_decades < 1:
            raise ConfigurationError("Value for w_fine_decades must be positive.")
        _new_options["w_fine_decades"] = w_fine_decades
    if w_coarse_per_decade is not None:
        if w_coarse_per_decade < 1:
            raise ConfigurationError("Value for w_coarse_per_decade must be positive.")
        _new_options["w_coarse_per_decade"] = w_coarse_per_decade
    if tail_points is not None:
        if tail_points < 16:
            raise ConfigurationError("Value for tail_points must be at least 16.")
        _new_options["tail_points"] = tail_points
    if chain_per_decade is not None:
        if chain_per_decade < 1:
            raise ConfigurationError("Value for chain_per_decade must be positive.")
        _new_options["chain_per_decade"] = chain_per_decade
    # pass-through other options with former values
    for k, v in _options.items():
        if k not in _new_options:
            _new_options[k] = v
    # update options
    _options = _new_options

__all__ = ("reset_options", "default_options", "get_options", "options", "set_options")
