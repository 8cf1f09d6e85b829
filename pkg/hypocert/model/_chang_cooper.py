r"""
    Chang–Cooper discretisation of the reversible one-dimensional generator :math:`f'' - E'f'`,
    used for numeric Poincaré constants and for the velocity step of the kinetic solver.

    On cells with centres :math:`c_j` and widths :math:`\Delta_j`, the equilibrium cell masses are
    :math:`n_j \propto e^{-E(c_j)}\Delta_j` and the face conductances are

    .. math::

        \kappa_{j+1/2} = \frac{e^{-E(c_j)}}{(c_{j+1}-c_j)\,\mathrm{exprel}(E(c_{j+1})-E(c_j))},

    which is symmetric in :math:`j \leftrightarrow j+1`. The discrete Dirichlet form
    :math:`\sum_j \kappa_{j+1/2}(f_{j+1}-f_j)^2` then vanishes exactly on constants and the generator is
    self-adjoint in :math:`\ell^2(n)`, so the discrete equilibrium is preserved exactly.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

import logging
import math
from typing import Tuple, TYPE_CHECKING

import numpy as np
from scipy import linalg, special

from .err import ConfigurationError, ModelError
from ._quadrature import FloatArray

if TYPE_CHECKING:
    from ._energies import RadialEnergy

_log = logging.getLogger(__name__)

def cell_masses(energy_values: FloatArray, widths: FloatArray) -> FloatArray:
    r""" Normalized equilibrium masses :math:`n_j`. """
    log_m = -(energy_values-np.min(energy_values))+np.log(widths)
    m = np.exp(log_m-np.max(log_m))
    return np.asarray(m/np.sum(m), dtype=np.float64)

def conductances(centres: FloatArray, energy_values: FloatArray, widths: FloatArray) -> FloatArray:
    r"""
        Face conductances :math:`\kappa_{j+1/2}`, on the same normalization as :func:`cell_masses`.
        The returned array has one entry per interior face.
    """
    shift = np.min(energy_values)
    log_m = -(energy_values-shift)+np.log(widths)
    log_norm = np.max(log_m)+math.log(np.sum(np.exp(log_m-np.max(log_m))))
    left = energy_values[:-1]-shift
    jump = np.diff(energy_values)
    gaps = np.diff(centres)
    return np.asarray(np.exp(-left-log_norm)/special.exprel(jump)/gaps, dtype=np.float64)

def symmetric_generator(masses: FloatArray, kappa: FloatArray) -> Tuple[FloatArray, FloatArray]:
    r"""
        Diagonal and off-diagonal of :math:`N^{-1/2} A N^{-1/2}`, where :math:`A` is the weighted graph Laplacian
        of the conductances and :math:`N=\mathrm{diag}(n)`; its spectrum is that of minus the discrete generator.
    """
    padded = np.concatenate([[0.0], kappa, [0.0]])
    diag = (padded[:-1]+padded[1:])/masses
    off = -kappa/np.sqrt(masses[:-1]*masses[1:])
    return diag, off

def implicit_banded(masses: FloatArray, kappa: FloatArray, scale: float) -> FloatArray:
    r"""
        Banded (upper form, 3 rows) representation of :math:`N + \lambda A`, the matrix of one implicit step
        :math:`h \mapsto (N+\lambda A)^{-1} N h` of the discrete generator, with :math:`\lambda` given by ``scale``.
    """
    padded = np.concatenate([[0.0], kappa, [0.0]])
    ab = np.zeros((3, masses.size), dtype=np.float64)
    ab[0, 1:] = -scale*kappa
    ab[1, :] = masses+scale*(padded[:-1]+padded[1:])
    ab[2, :-1] = -scale*kappa
    return ab

def uniform_cells(energy: RadialEnergy, energy_range: float, num_nodes: int) -> Tuple[FloatArray, FloatArray]:
    r"""
        Uniform cell centres on :math:`[-X,X]`, where :math:`E(X)-E(0)` first exceeds ``energy_range``, and their widths.
    """
    e0 = float(energy.value(np.float64(0.0)))
    hi = 1.0
    while float(energy.value(np.float64(hi)))-e0 < energy_range:
        hi *= 1.25
        if hi > 1e12:
            raise ModelError(f"Error building cells for {energy!r}: energy does not reach {energy_range:g} above its minimum.")
    centres = np.linspace(-hi, hi, num_nodes)
    widths = np.full(num_nodes, centres[1]-centres[0])
    return centres, widths

def spectral_gap(energy: RadialEnergy, *, num_nodes: int = 801, energy_range: float = 40.0) -> float:
    r"""
        Poincaré constant :math:`C_P` of the one-dimensional Gibbs measure of ``energy``, in the convention
        :math:`\mathrm{Var}(f) \leq C_P^{-1}\int |f'|^2`, as the spectral gap of the Chang–Cooper generator.

        >>> from hypocert.model import Kinetic
        >>> round(spectral_gap(Kinetic("gaussian")), 3)
        1.0
    """
    if energy.dim != 1:
        raise ConfigurationError(f"Error computing spectral gap of {energy!r}: only dimension 1 is supported.")
    centres, widths = uniform_cells(energy, energy_range, num_nodes)
    values = energy.value(centres)
    masses = cell_masses(values, widths)
    kappa = conductances(centres, values, widths)
    diag, off = symmetric_generator(masses, kappa)
    eigenvalues = linalg.eigh_tridiagonal(diag, off, eigvals_only=True, select="i", select_range=(1, 1))
    gap = float(eigenvalues[0])
    _log.debug("Spectral gap of %r on [%g, %g] with %d cells: %g", energy, centres[0], centres[-1], num_nodes, gap)
    if not gap > 0.0:
        raise ModelError(f"Error computing spectral gap of {energy!r}: non-positive gap {gap!r}.")
    return gap

__all__ = ("cell_masses", "conductances", "symmetric_generator", "implicit_banded", "uniform_cells", "spectral_gap")
