"""
    Functions to generate random scenarios, beta functions and initial data, for property tests.
"""
# pylint: disable = global-statement

from __future__ import annotations # See https://peps.python.org/pep-0563/

from contextlib import contextmanager
import math
from random import Random # pylint: disable = import-self
from types import MappingProxyType
from typing import Any, Dict, Iterator, Mapping, Optional

import numpy as np
from typing_validation import validate

from .model import ConfigurationError, FloatArray
from .scenario import ModelSpec, Scenario, SolverSettings
from .solver import PhaseGrid
from .weakpi import BetaFn, Poly, StretchedExp

_default_options: Dict[str, Any] = {
    "min_log_p": 1.0,
    "max_log_p": 6.0,
    "min_alpha": 0.25,
    "max_alpha": 0.9,
    "min_gamma": 0.25,
    "max_gamma": 4.0,
    "min_tau": 0.25,
    "max_tau": 4.0,
    "min_cells": 16,
    "max_cells": 48,
    "float_decimals": 3,
    "include_subexp": True,
}

_options = _default_options
_rand = Random(0)

def reset_options() -> None:
    """
        Resets random generation options to their default values.
    """
    global _options
    global _rand
    _options = _default_options
    _rand = Random(0)

def default_options() -> Mapping[str, Any]:
    """
        Readonly view of the default random generation options.
    """
    return MappingProxyType(_default_options)

def get_options() -> Mapping[str, Any]:
    """
        Readonly view of the current random generation options.
    """
    return MappingProxyType(_options)

@contextmanager
def options(*,
            seed: Optional[int] = None,
            min_log_p: Optional[float] = None,
            max_log_p: Optional[float] = None,
            min_alpha: Optional[float] = None,
            max_alpha: Optional[float] = None,
            min_gamma: Optional[float] = None,
            max_gamma: Optional[float] = None,
            min_tau: Optional[float] = None,
            max_tau: Optional[float] = None,
            min_cells: Optional[int] = None,
            max_cells: Optional[int] = None,
            float_decimals: Optional[int] = None,
            include_subexp: Optional[bool] = None,) -> Iterator[None]:
    """
        Returns with-statement context manager for temporary option setting:

        .. code-block:: python

            with options(seed=3, max_cells=24):
                for scenario in rand_scenario(num_samples):
                    ...

        Options available:

        .. code-block::

            seed: int             # set new random number generator, with this seed
            min_log_p: float      # smallest p of logarithmic potentials
            max_log_p: float      # largest p of logarithmic potentials
            min_alpha: float      # smallest alpha of sub-exponential potentials
            max_alpha: float      # largest alpha of sub-exponential potentials
            min_gamma: float      # smallest friction
            max_gamma: float      # largest friction
            min_tau: float        # smallest averaging window
            max_tau: float        # largest averaging window
            min_cells: int        # fewest cells per axis
            max_cells: int        # most cells per axis
            float_decimals: int   # number of decimals to keep in floats
            include_subexp: bool  # whether to generate sub-exponential potentials
    """
    # pylint: disable = too-many-locals, too-many-arguments
    global _options
    global _rand
    _old_options = _options
    _old_rand = _rand
    try:
        set_options(seed=seed, min_log_p=min_log_p, max_log_p=max_log_p, min_alpha=min_alpha, max_alpha=max_alpha,
                    min_gamma=min_gamma, max_gamma=max_gamma, min_tau=min_tau, max_tau=max_tau,
                    min_cells=min_cells, max_cells=max_cells, float_decimals=float_decimals,
                    include_subexp=include_subexp)
        yield
    finally:
        _options = _old_options
        _rand = _old_rand

def set_options(*,
                seed: Optional[int] = None,
                min_log_p: Optional[float] = None,
                max_log_p: Optional[float] = None,
                min_alpha: Optional[float] = None,
                max_alpha: Optional[float] = None,
                min_gamma: Optional[float] = None,
                max_gamma: Optional[float] = None,
                min_tau: Optional[float] = None,
                max_tau: Optional[float] = None,
                min_cells: Optional[int] = None,
                max_cells: Optional[int] = None,
                float_decimals: Optional[int] = None,
                include_subexp: Optional[bool] = None,) -> None:
    """
        Permanently sets random generation options. See :func:`options` for the available options.
    """
    # pylint: disable = too-many-branches, too-many-locals, too-many-arguments
    for iarg in (seed, min_cells, max_cells, float_decimals):
        validate(iarg, Optional[int])
    for farg in (min_log_p, max_log_p, min_alpha, max_alpha, min_gamma, max_gamma, min_tau, max_tau):
        validate(farg, Optional[float])
    validate(include_subexp, Optional[bool])
    global _options
    global _rand
    # set newly passed options
    _new_options: Dict[str, Any] = {}
    if seed is not None:
        _rand = Random(seed)
    for name, value in (("min_log_p", min_log_p), ("max_log_p", max_log_p), ("min_gamma", min_gamma),
                        ("max_gamma", max_gamma), ("min_tau", min_tau), ("max_tau", max_tau)):
        if value is not None:
            if not 0.0 < value < math.inf:
                raise ConfigurationError(f"Value for {name} must be positive and finite.")
            _new_options[name] = value
    for name, value in (("min_alpha", min_alpha), ("max_alpha", max_alpha)):
        if value is not None:
            if not 0.0 < value < 1.0:
                raise ConfigurationError(f"Value for {name} must lie in (0, 1).")
            _new_options[name] = value
    for name, ivalue in (("min_cells", min_cells), ("max_cells", max_cells)):
        if ivalue is not None:
            if ivalue < 4:
                raise ConfigurationError(f"Value for {name} must be at least 4.")
            _new_options[name] = ivalue
    if float_decimals is not None:
        if float_decimals < 0:
            raise ConfigurationError("Value for float_decimals is negative.")
        _new_options["float_decimals"] = float_decimals
    if include_subexp is not None:
        _new_options["include_subexp"] = include_subexp
    # pass-through other options with former values
    for k, v in _options.items():
        if k not in _new_options:
            _new_options[k] = v
    # check compatibility conditions
    for lo, hi in (("min_log_p", "max_log_p"), ("min_alpha", "max_alpha"), ("min_gamma", "max_gamma"),
                   ("min_tau", "max_tau"), ("min_cells", "max_cells")):
        if _new_options[lo] > _new_options[hi]:
            raise ConfigurationError(f"Value for {lo} is larger than value for {hi}.")
    # update options
    _options = _new_options

def _uniform(lo: float, hi: float) -> float:
    return round(_rand.uniform(lo, hi), _options["float_decimals"]) or lo

def _log_uniform(lo: float, hi: float) -> float:
    value = round(math.exp(_rand.uniform(math.log(lo), math.log(hi))), _options["float_decimals"])
    return min(max(value, lo), hi)

def rand_model_spec(n: Optional[int] = None) -> Iterator[ModelSpec]:
    r"""
        Generates a stream of random weakly confining one-dimensional model fragments with Gaussian velocities:
        logarithmic potentials and, unless disabled, sub-exponential ones with :math:`\alpha<1`.

        :param n: the number of samples to be yielded; if :obj:`None`, an infinite stream is yielded
    """
    validate(n, Optional[int])
    if n is not None and n < 0:
        raise ValueError()
    i = 0
    while n is None or i < n:
        if _options["include_subexp"] and _rand.random() < 0.5:
            yield ModelSpec("subexp", _uniform(_options["min_alpha"], _options["max_alpha"]))
        else:
            yield ModelSpec("log", _uniform(_options["min_log_p"], _options["max_log_p"]))
        i += 1

def rand_scenario(n: Optional[int] = None) -> Iterator[Scenario]:
    """
        Generates a stream of random scenarios on small grids, with short final times.

        :param n: the number of samples to be yielded; if :obj:`None`, an infinite stream is yielded
    """
    validate(n, Optional[int])
    if n is not None and n < 0:
        raise ValueError()
    models = rand_model_spec()
    i = 0
    while n is None or i < n:
        cells = _rand.randint(_options["min_cells"], _options["max_cells"])
        solver = SolverSettings(nx=cells, nv=cells, t_final=_uniform(0.5, 2.0), stride=1)
        yield Scenario(name=f"random-{i}", model=next(models),
                       gamma=_log_uniform(_options["min_gamma"], _options["max_gamma"]),
                       tau=_log_uniform(_options["min_tau"], _options["max_tau"]),
                       seed=_rand.randrange(2**32), solver=solver)
        i += 1

def rand_beta(n: Optional[int] = None) -> Iterator[BetaFn]:
    r"""
        Generates a stream of closed-form weak Poincaré functions: polynomial ones with :math:`\eta_1\in[1/2,4]`
        and stretched exponential ones with :math:`\eta_2\in[1/4,2]`.

        :param n: the number of samples to be yielded; if :obj:`None`, an infinite stream is yielded
    """
    validate(n, Optional[int])
    if n is not None and n < 0:
        raise ValueError()
    i = 0
    while n is None or i < n:
        if _rand.random() < 0.5:
            yield Poly(_log_uniform(0.1, 10.0), _uniform(0.5, 4.0))
        else:
            yield StretchedExp(_log_uniform(0.1, 1.0), _log_uniform(0.1, 10.0), _uniform(0.25, 2.0))
        i += 1

def rand_field(grid: PhaseGrid, n: Optional[int] = None) -> Iterator[FloatArray]:
    r"""
        Generates a stream of random cell values on a grid, with entries in :math:`[-1,1]` before centring
        and discrete :math:`\Theta`-mean zero.

        :param grid: the phase grid
        :param n: the number of samples to be yielded; if :obj:`None`, an infinite stream is yielded
    """
    validate(grid, PhaseGrid)
    validate(n, Optional[int])
    if n is not None and n < 0:
        raise ValueError()
    i = 0
    while n is None or i < n:
        rng = np.random.default_rng(_rand.randrange(2**63))
        values = rng.uniform(-1.0, 1.0, grid.shape)
        yield np.asarray(values-grid.mean(values), dtype=np.float64)
        i += 1

__all__ = ("reset_options", "default_options", "get_options", "options", "set_options",
           "rand_model_spec", "rand_scenario", "rand_beta", "rand_field")
