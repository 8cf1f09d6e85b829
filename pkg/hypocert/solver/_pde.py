r"""
    Finite-volume solver for the kinetic Ornstein–Uhlenbeck equation in dimension 1,

    .. math::

        \partial_t h = \psi'(v)\partial_x h - \phi'(x)\partial_v h + \gamma(\partial_v^2 h - \psi'(v)\partial_v h).

    The transport part is discretised as a jump process between neighbouring cells, with face fluxes
    :math:`G^x_{i+1/2,j} = \mu_{i+1/2}\tilde\nu_j` and :math:`G^v_{i,j+1/2} = \tilde\mu_i\nu_{j+1/2}`, where
    :math:`\mu_{i+1/2},\nu_{j+1/2}` are face densities (zero on the outer faces) and :math:`\tilde\mu_i,\tilde\nu_j` their
    differences across a cell. Fluxes are divergence-free cell by cell, so the cell masses of :math:`\Theta` are invariant
    and upwind jumps give a Markov step: mass conservation, the maximum principle and :math:`L^2(\Theta)` contraction hold
    exactly under the step bound. The velocity diffusion is an implicit Chang–Cooper step. Steps are Strang split:
    half transport, full diffusion, half transport.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

from dataclasses import dataclass, field
import functools
import logging
import math
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy import integrate as _sp_integrate, linalg
from typing_validation import validate

from ..model import ConfigurationError, FloatArray, Model, conductances, implicit_banded
from .err import CFLError, InstabilityError
from ._grid import InitialDatum, PhaseGrid, initial_field

_log = logging.getLogger(__name__)

_DEFAULT_CFL = 0.9
_L2_TOLERANCE = 1e-12

def _face_densities(faces: FloatArray, values_at: FloatArray, face_values: FloatArray) -> FloatArray:
    # face densities on the normalization of cell_masses; outer faces carry zero flux
    shift = float(np.min(values_at))
    log_m = -(values_at-shift)+np.log(np.diff(faces))
    log_norm = float(np.max(log_m))+math.log(float(np.sum(np.exp(log_m-np.max(log_m)))))
    dens = np.exp(-(face_values-shift)-log_norm)
    dens[0] = 0.0
    dens[-1] = 0.0
    return np.asarray(dens, dtype=np.float64)

class Discretization:
    r"""
        The discrete operators of a model on a phase grid for a given friction :math:`\gamma`.
    """

    _grid: PhaseGrid
    _gamma: float
    _weights: FloatArray
    _gx: FloatArray
    _gv: FloatArray
    _kappa: FloatArray
    _outflow: FloatArray
    _banded: Callable[[float], FloatArray]

    def __new__(cls, model: Model, grid: PhaseGrid, gamma: float, *, transport: bool = True) -> Discretization:
        validate(model, Model)
        validate(grid, PhaseGrid)
        validate(gamma, float)
        if not 0.0 <= gamma < math.inf:
            raise ConfigurationError(f"Error discretising: gamma must be non-negative and finite (found {gamma!r}).")
        phi, psi = model.potential, model.kinetic
        mu_faces = _face_densities(grid.x_faces, phi.value(grid.x_centres), phi.value(grid.x_faces))
        nu_faces = _face_densities(grid.v_faces, psi.value(grid.v_centres), psi.value(grid.v_faces))
        mu_tilde = np.diff(mu_faces)
        nu_tilde = -np.diff(nu_faces)
        instance = object.__new__(cls)
        instance._grid = grid
        instance._gamma = gamma
        instance._weights = grid.weights
        # interior faces only: outer fluxes vanish
        instance._gx = np.outer(mu_faces[1:-1], nu_tilde) if transport else np.zeros((grid.shape[0]-1, grid.shape[1]))
        instance._gv = np.outer(mu_tilde, nu_faces[1:-1]) if transport else np.zeros((grid.shape[0], grid.shape[1]-1))
        instance._kappa = conductances(grid.v_centres, psi.value(grid.v_centres), grid.v_widths)
        instance._outflow = instance._flux_balance()[0]/instance._weights
        # implicit step matrices by gamma*dt
        banded = functools.partial(implicit_banded, grid.v_masses, instance._kappa)
        instance._banded = functools.lru_cache(maxsize=8)(banded)
        return instance

    def _flux_balance(self) -> Tuple[FloatArray, FloatArray]:
        out = np.zeros_like(self._weights)
        inflow = np.zeros_like(self._weights)
        gx_pos, gx_neg = np.maximum(self._gx, 0.0), np.maximum(-self._gx, 0.0)
        gv_pos, gv_neg = np.maximum(self._gv, 0.0), np.maximum(-self._gv, 0.0)
        out[:-1, :] += gx_pos
        out[1:, :] += gx_neg
        out[:, :-1] += gv_pos
        out[:, 1:] += gv_neg
        inflow[1:, :] += gx_pos
        inflow[:-1, :] += gx_neg
        inflow[:, 1:] += gv_pos
        inflow[:, :-1] += gv_neg
        return out, inflow

    @property
    def grid(self) -> PhaseGrid:
        r""" The phase grid. """
        return self._grid

    @property
    def gamma(self) -> float:
        r""" The friction :math:`\gamma`. """
        return self._gamma

    @property
    def divergence(self) -> float:
        r""" Largest cell imbalance between outgoing and incoming transport flux (zero up to rounding). """
        out, inflow = self._flux_balance()
        return float(np.max(np.abs(out-inflow)))

    @property
    def max_rate(self) -> float:
        r""" Largest total jump rate out of a cell. """
        return float(np.max(self._outflow))

    def stable_dt(self, cfl: float = _DEFAULT_CFL) -> float:
        r""" Largest full step for which each transport half step is a convex combination, times ``cfl``. """
        rate = self.max_rate
        return math.inf if rate == 0.0 else 2.0*cfl/rate

    def transport(self, h: FloatArray) -> FloatArray:
        r""" The upwind transport generator applied to cell values. """
        dh = np.zeros_like(h)
        gx_pos, gx_neg = np.maximum(self._gx, 0.0), np.maximum(-self._gx, 0.0)
        gv_pos, gv_neg = np.maximum(self._gv, 0.0), np.maximum(-self._gv, 0.0)
        diff_x = h[1:, :]-h[:-1, :]
        diff_v = h[:, 1:]-h[:, :-1]
        dh[:-1, :] += gx_pos*diff_x
        dh[1:, :] -= gx_neg*diff_x
        dh[:, :-1] += gv_pos*diff_v
        dh[:, 1:] -= gv_neg*diff_v
        return dh/self._weights

    def diffuse(self, h: FloatArray, dt: float) -> FloatArray:
        r""" One implicit Chang–Cooper step of the velocity diffusion, row by row. """
        if self._gamma == 0.0:
            return h.copy()
        lam = self._gamma*dt
        ab = self._banded(lam)
        rhs = (h*self._grid.v_masses[None, :]).T
        return np.asarray(linalg.solve_banded((1, 1), ab, rhs, check_finite=False).T, dtype=np.float64)

    def dissipation(self, h: FloatArray) -> float:
        r""" Physical dissipation rate :math:`\gamma\|\partial_v h\|^2_{L^2(\Theta)}` of the discrete velocity form. """
        dv = np.diff(h, axis=1)
        return self._gamma*float(np.sum(self._grid.x_masses[:, None]*self._kappa[None, :]*dv**2))

    def numerical_dissipation(self, h: FloatArray) -> float:
        r""" Dissipation rate of the upwind transport, :math:`\tfrac12\sum_{\mathrm{faces}}|G|(\Delta h)^2`. """
        return 0.5*float(np.sum(np.abs(self._gx)*np.diff(h, axis=0)**2)+np.sum(np.abs(self._gv)*np.diff(h, axis=1)**2))

@dataclass
class DensityField:
    r"""
        Cell values :math:`h(t,x_i,v_j)` at time :math:`t`.
    """

    values: FloatArray
    t: float = 0.0

    def mass(self, grid: PhaseGrid) -> float:
        r""" Discrete :math:`\int h\,d\Theta`. """
        return grid.mean(self.values)

    def norm_sq(self, grid: PhaseGrid) -> float:
        r""" Discrete :math:`\|h\|^2_{L^2(\Theta)}`. """
        return grid.norm_sq(self.values)

    @property
    def linf(self) -> float:
        r""" :math:`\|h\|_\infty` over the cells. """
        return float(np.max(np.abs(self.values)))

    @property
    def oscillation(self) -> float:
        r""" :math:`\Phi(h) = (\max h-\min h)^2`. """
        return float(np.max(self.values)-np.min(self.values))**2

def step_pde(field_: DensityField, dt: float, disc: Discretization) -> DensityField:
    r"""
        One Strang-split step: half transport, implicit velocity diffusion, half transport.

        :raises CFLError: if ``dt`` exceeds the transport step bound
    """
    validate(dt, float)
    if not dt > 0.0:
        raise CFLError(f"Error stepping: time step must be positive (found {dt!r}).")
    if dt*disc.max_rate > 2.0*(1.0+1e-12):
        raise CFLError(f"Error stepping with dt = {dt:g}: transport half steps need dt <= {2.0/disc.max_rate:g}.")
    half = 0.5*dt
    h = field_.values
    h = h+half*disc.transport(h)
    h = disc.diffuse(h, dt)
    h = h+half*disc.transport(h)
    return DensityField(h, field_.t+dt)

@dataclass
class DecaySeries:
    r"""
        Samples of a decay run: norms, oscillation, windowed energy :math:`\mathcal{H}_\tau` and dissipation
        :math:`\mathcal{D}_\tau` (``nan`` where the window reaches past the final time), the energy identity
        residual and the pairing :math:`\langle h_0, h(t)\rangle_\Theta`.
    """

    times: FloatArray
    l2_sq: FloatArray
    linf: FloatArray
    osc: FloatArray
    mass: FloatArray
    H_tau: FloatArray
    D_tau: FloatArray
    energy_residual: FloatArray
    pairing: FloatArray
    tau: float
    dt: float
    dropped_windows: int
    meta: Dict[str, float] = field(default_factory=dict)

    @property
    def initial_oscillation(self) -> float:
        r""" :math:`\Phi(h_0)`. """
        return float(self.osc[0])

def windowed(times: FloatArray, values: FloatArray, tau: float, at: FloatArray) -> FloatArray:
    r"""
        Forward window averages :math:`\tau^{-1}\int_t^{t+\tau} f`, by the trapezoidal rule on the step times;
        ``nan`` where the window is incomplete.
    """
    cum = _sp_integrate.cumulative_trapezoid(values, times, initial=0.0)
    out = np.full(len(at), math.nan)
    complete = at+tau <= times[-1]*(1.0+1e-12)
    start = np.interp(at[complete], times, cum)
    end = np.interp(at[complete]+tau, times, cum)
    out[complete] = (end-start)/tau
    return out

def run_decay(model: Model, grid: PhaseGrid, gamma: float, t_final: float, *, tau: float = 1.0,
              datum: InitialDatum = "tanh-x", dt: Optional[float] = None, stride: int = 1,
              cfl: float = _DEFAULT_CFL, transport: bool = True) -> DecaySeries:
    r"""
        Evolves the centred initial datum up to ``t_final`` and samples every ``stride`` steps.

        The energy identity residual at a step is :math:`|\Delta\|h\|^2/\Delta t + 2(D+N)|`, with :math:`D`
        the physical and :math:`N` the numerical dissipation at the start of the step; it is first order in :math:`\Delta t`.

        :raises InstabilityError: if :math:`\|h\|^2` increases by more than :math:`10^{-12}\|h_0\|^2` in a step
    """
    # pylint: disable = too-many-arguments, too-many-locals
    validate(t_final, float)
    validate(stride, int)
    if not 0.0 < t_final < math.inf or stride < 1:
        raise ConfigurationError(f"Error running decay: need a positive final time and stride (found {t_final!r}, {stride}).")
    disc = Discretization(model, grid, gamma, transport=transport)
    if dt is None:
        dt = min(disc.stable_dt(cfl), t_final)
    num_steps = int(math.ceil(t_final/dt-1e-9))
    dt = t_final/num_steps
    h0 = initial_field(grid, datum)
    state = DensityField(h0, 0.0)
    w = grid.weights
    e0 = grid.norm_sq(h0)
    times: List[float] = [0.0]
    l2: List[float] = [e0]
    diss: List[float] = []
    residual: List[float] = []
    samples: List[Tuple[float, float, float, float]] = [(state.linf, state.oscillation, state.mass(grid),
                                                         float(np.sum(w*h0*h0)))]
    sample_steps = [0]
    for k in range(1, num_steps+1):
        d_phys = disc.dissipation(state.values)
        d_num = disc.numerical_dissipation(state.values)
        new = step_pde(state, dt, disc)
        e_new = grid.norm_sq(new.values)
        if e_new > l2[-1]+_L2_TOLERANCE*max(e0, 1e-300):
            raise InstabilityError(f"Error at step {k} (t = {new.t:g}): L2 energy increased from {l2[-1]:.17g} "
                                   f"to {e_new:.17g}.")
        residual.append(abs((e_new-l2[-1])/dt+2.0*(d_phys+d_num)))
        diss.append(d_phys)
        times.append(new.t)
        l2.append(e_new)
        state = new
        if k % stride == 0 or k == num_steps:
            sample_steps.append(k)
            samples.append((state.linf, state.oscillation, state.mass(grid), float(np.sum(w*h0*state.values))))
    diss.append(disc.dissipation(state.values))
    residual.append(residual[-1] if residual else 0.0)
    t_all, l2_all = np.array(times), np.array(l2)
    idx = np.array(sample_steps)
    at = t_all[idx]
    H = windowed(t_all, l2_all, tau, at)
    D = 2.0*windowed(t_all, np.array(diss), tau, at)
    dropped = int(np.count_nonzero(np.isnan(H)))
    linf, osc, mass, pairing = (np.array(col) for col in zip(*samples))
    _log.info("Decay run on %dx%d cells: %d steps of %g, L2 energy %g -> %g, %d incomplete windows",
              grid.shape[0], grid.shape[1], num_steps, dt, e0, l2_all[-1], dropped)
    return DecaySeries(at, l2_all[idx], linf, osc, mass, H, D, np.array(residual)[idx], pairing, tau, dt, dropped,
                       {"gamma": gamma, "t_final": t_final, "nx": float(grid.shape[0]), "nv": float(grid.shape[1])})

__all__ = ("Discretization", "DensityField", "step_pde", "DecaySeries", "windowed", "run_decay")
