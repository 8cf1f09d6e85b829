r"""
    Truncated phase-space grids for the one-dimensional kinetic equation and the initial data used in experiments.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

from dataclasses import dataclass
import logging
import math
from typing import Callable, Optional, Tuple, Union
from typing_extensions import Literal

import numpy as np
from typing_validation import validate

from ..model import ConfigurationError, FloatArray, Model, RadialEnergy, cell_masses

_log = logging.getLogger(__name__)

InitialDatum = Literal["tanh-x", "tanh-v", "tanh-xv", "constant"]
r"""
    Bounded initial data: :math:`\tanh(x)`, :math:`\tanh(v)`, :math:`\tanh(x)\tanh(v)`, or a constant;
    all are centred by their :math:`\Theta`-mean before use.
"""

Stretch = Union[float, Literal["auto", "uniform"]]

_X_TAIL = 1e-6
_V_TAIL = 1e-10

@dataclass(frozen=True)
class PhaseGrid:
    r"""
        A tensor grid of cells on :math:`[-X,X]\times[-V,V]`, symmetric about the origin, with the equilibrium
        cell masses of :math:`\mu` and :math:`\nu` and their product :attr:`weights`, which sum to 1.
    """

    x_faces: FloatArray
    x_centres: FloatArray
    x_masses: FloatArray
    v_faces: FloatArray
    v_centres: FloatArray
    v_masses: FloatArray

    @property
    def shape(self) -> Tuple[int, int]:
        r""" Number of cells along :math:`x` and :math:`v`. """
        return len(self.x_centres), len(self.v_centres)

    @property
    def x_widths(self) -> FloatArray:
        r""" Cell widths along :math:`x`. """
        return np.diff(self.x_faces)

    @property
    def v_widths(self) -> FloatArray:
        r""" Cell widths along :math:`v`. """
        return np.diff(self.v_faces)

    @property
    def weights(self) -> FloatArray:
        r""" Cell masses of :math:`\Theta=\mu\otimes\nu`. """
        return np.outer(self.x_masses, self.v_masses)

    def mean(self, values: FloatArray) -> float:
        r""" Discrete :math:`\Theta`-integral. """
        return float(np.sum(self.weights*values))

    def norm_sq(self, values: FloatArray) -> float:
        r""" Discrete :math:`\|h\|^2_{L^2(\Theta)}`. """
        return float(np.sum(self.weights*values**2))

    def refined(self, model: Model) -> PhaseGrid:
        r""" The grid with every cell split in two, on the same cutoffs and stretching. """
        return PhaseGrid(*_split(self.x_faces, model.potential), *_split(self.v_faces, model.kinetic))

def _split(faces: FloatArray, energy: RadialEnergy) -> Tuple[FloatArray, FloatArray, FloatArray]:
    mids = 0.5*(faces[:-1]+faces[1:])
    new_faces = np.empty(2*len(faces)-1)
    new_faces[0::2] = faces
    new_faces[1::2] = mids
    centres = 0.5*(new_faces[:-1]+new_faces[1:])
    return new_faces, centres, cell_masses(energy.value(centres), np.diff(new_faces))

def axis_cells(cutoff: float, num_cells: int, stretch: Optional[float]) -> Tuple[FloatArray, FloatArray]:
    r"""
        Faces and centres of ``num_cells`` cells on :math:`[-X,X]`: uniform, or the image of a uniform grid
        under :math:`\xi\mapsto L\sinh(\xi)` for a stretch length :math:`L`.

        >>> faces, centres = axis_cells(2.0, 4, None)
        >>> centres.tolist()
        [-1.5, -0.5, 0.5, 1.5]
    """
    if not 0.0 < cutoff < math.inf or num_cells < 2:
        raise ConfigurationError(f"Error building cells: need a positive cutoff and at least 2 cells "
                                 f"(found {cutoff!r}, {num_cells}).")
    if stretch is None:
        faces = np.linspace(-cutoff, cutoff, num_cells+1)
        return faces, 0.5*(faces[:-1]+faces[1:])
    xi = math.asinh(cutoff/stretch)
    xi_faces = np.linspace(-xi, xi, num_cells+1)
    return stretch*np.sinh(xi_faces), stretch*np.sinh(0.5*(xi_faces[:-1]+xi_faces[1:]))

def _resolve_stretch(stretch: Stretch, energy: RadialEnergy) -> Optional[float]:
    if stretch == "uniform":
        return None
    if stretch == "auto":
        heavy = energy.kind == "log" or (energy.kind == "subexp" and energy.param < 1.0)
        return 1.0 if heavy else None
    if not 0.0 < stretch < math.inf:
        raise ConfigurationError(f"Error building cells: stretch length must be positive (found {stretch!r}).")
    return float(stretch)

def make_grid(model: Model, nx: int, nv: int, *, x_max: Optional[float] = None, v_max: Optional[float] = None,
              x_stretch: Stretch = "auto", v_stretch: Stretch = "auto") -> PhaseGrid:
    r"""
        Builds the phase grid of a one-dimensional model. Cutoffs default to the radii beyond which
        :math:`\mu` has mass :math:`10^{-6}` and :math:`\nu` has mass :math:`10^{-10}`; heavy-tailed
        energies get sinh-stretched cells by default.

        :raises ConfigurationError: in dimension :math:`d>1`
    """
    # pylint: disable = too-many-arguments
    validate(model, Model)
    validate(nx, int)
    validate(nv, int)
    if model.dim != 1:
        raise ConfigurationError(f"Error building phase grid: only dimension 1 can be simulated (found {model.dim}).")
    if x_max is None:
        x_max = model.mu.radius_for_mass(_X_TAIL, model.quadrature)
    if v_max is None:
        v_max = model.nu.radius_for_mass(_V_TAIL, model.quadrature)
    x_faces, x_centres = axis_cells(x_max, nx, _resolve_stretch(x_stretch, model.potential))
    v_faces, v_centres = axis_cells(v_max, nv, _resolve_stretch(v_stretch, model.kinetic))
    a = cell_masses(model.potential.value(x_centres), np.diff(x_faces))
    b = cell_masses(model.kinetic.value(v_centres), np.diff(v_faces))
    _log.debug("Phase grid %dx%d on [-%g, %g] x [-%g, %g]", nx, nv, x_max, x_max, v_max, v_max)
    return PhaseGrid(x_faces, x_centres, a, v_faces, v_centres, b)

def datum_factors(kind: InitialDatum) -> Tuple[Callable[[FloatArray], FloatArray], Callable[[FloatArray], FloatArray]]:
    r"""
        The datum as a product :math:`f(x)g(v)`, before centring.
    """
    validate(kind, InitialDatum)
    ones: Callable[[FloatArray], FloatArray] = np.ones_like
    if kind == "tanh-x":
        return np.tanh, ones
    if kind == "tanh-v":
        return ones, np.tanh
    if kind == "tanh-xv":
        return np.tanh, np.tanh
    return ones, ones

def initial_field(grid: PhaseGrid, kind: InitialDatum = "tanh-x") -> FloatArray:
    r"""
        Cell values of the initial datum minus its discrete :math:`\Theta`-mean.

        >>> from hypocert.model import make_benchmark
        >>> grid = make_grid(make_benchmark("log", 2.0, "gaussian"), 16, 16)
        >>> abs(grid.mean(initial_field(grid))) < 1e-15
        True
    """
    f, g = datum_factors(kind)
    values = np.outer(f(grid.x_centres), g(grid.v_centres))
    return np.asarray(values-grid.mean(values), dtype=np.float64)

__all__ = ("InitialDatum", "Stretch", "PhaseGrid", "axis_cells", "make_grid", "datum_factors", "initial_field")
