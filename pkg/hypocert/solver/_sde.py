r"""
    Particle ensembles for the underdamped Langevin dynamics in dimension 1,

    .. math::

        dX_t = \psi'(V_t)\,dt, \qquad dV_t = -\phi'(X_t)\,dt - \gamma\psi'(V_t)\,dt + \sqrt{2\gamma}\,dB_t,

    and the Monte Carlo estimate of the stationary autocovariance :math:`\langle h_0, e^{t\mathcal{L}}h_0\rangle_\Theta`.

    Noise is counter-based: the normals used by block :math:`b` of particles at step :math:`k` come from a Philox stream
    keyed by ``SeedSequence(seed, spawn_key=(b, k))``, so the seed determines every trajectory regardless of the order
    in which blocks are processed. Streams are keyed by block, not by particle: particle ``i`` draws its normals from
    the stream of block ``i // BLOCK_SIZE``. Its trajectory does not depend on the ensemble size, but it does depend on
    :data:`BLOCK_SIZE`, which is part of the reproducibility contract together with the seed.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

from dataclasses import dataclass, replace
import logging
import math
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy import integrate as _sp_integrate, stats
from typing_validation import validate

from ..model import ConfigurationError, FloatArray, Model, RadialEnergy, integrate
from .err import NonFiniteStateError
from ._grid import InitialDatum, datum_factors

_log = logging.getLogger(__name__)

BLOCK_SIZE = 4096
r"""
    Number of particles sharing one random stream per step. Changing it changes the trajectories drawn for a given
    seed.
"""

_ESS_THRESHOLD = 1000.0
_INVERSE_CDF_TAIL = 1e-12
_INVERSE_CDF_NODES = 20001

@dataclass(frozen=True)
class SdeEnsemble:
    r"""
        Positions and velocities of :math:`N` particles, with the seed, step size, friction and step counter
        which determine the remaining trajectory.
    """

    x: FloatArray
    v: FloatArray
    seed: int
    dt: float
    gamma: float
    step: int = 0

    def __post_init__(self) -> None:
        if self.x.shape != self.v.shape or self.x.ndim != 1:
            raise ConfigurationError(f"Error assembling ensemble: positions {self.x.shape} and velocities "
                                     f"{self.v.shape} must be matching 1-dimensional arrays.")
        if not 0.0 < self.dt < math.inf or not 0.0 <= self.gamma < math.inf:
            raise ConfigurationError(f"Error assembling ensemble: need dt > 0 and gamma >= 0 "
                                     f"(found {self.dt!r}, {self.gamma!r}).")

    @property
    def size(self) -> int:
        r""" Number of particles. """
        return len(self.x)

    @property
    def t(self) -> float:
        r""" Elapsed time. """
        return self.step*self.dt

def _block_stream(seed: int, block: int, step: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block, step))))

def _normals(seed: int, step: int, size: int, draws: int) -> FloatArray:
    # shape (draws, size): each block of particles gets its own stream, consumed particle by particle
    out = np.empty((draws, size))
    for block, start in enumerate(range(0, size, BLOCK_SIZE)):
        stop = min(start+BLOCK_SIZE, size)
        out[:, start:stop] = _block_stream(seed, block, step).standard_normal((stop-start, draws)).T
    return out

def _inverse_cdf_sampler(energy: RadialEnergy) -> Callable[[FloatArray], FloatArray]:
    measure = energy.measure()
    radius = measure.radius_for_mass(_INVERSE_CDF_TAIL)
    nodes = np.linspace(-radius, radius, _INVERSE_CDF_NODES)
    log_rho = -(energy.value(nodes)-np.min(energy.value(nodes)))
    cdf = _sp_integrate.cumulative_trapezoid(np.exp(log_rho), nodes, initial=0.0)
    cdf /= cdf[-1]
    def sampler(u: FloatArray) -> FloatArray:
        return np.asarray(np.interp(u, cdf, nodes), dtype=np.float64)
    return sampler

def sample_gibbs(energy: RadialEnergy, n: int, rng: np.random.Generator) -> FloatArray:
    r"""
        Draws ``n`` independent samples of :math:`e^{-E}/Z` in dimension 1.

        Logarithmic energies :math:`(1+p)\log\langle x\rangle` are Student-t laws with :math:`p` degrees of freedom
        rescaled by :math:`p^{-1/2}`; Gaussians are sampled directly; sub-exponential energies by inverse CDF on a grid.
    """
    validate(n, int)
    if energy.dim != 1:
        raise ConfigurationError(f"Error sampling {energy!r}: only dimension 1 is supported.")
    if energy.kind == "gaussian":
        return rng.standard_normal(n)
    if energy.kind == "log":
        p = energy.param
        return np.asarray(stats.t.rvs(df=p, size=n, random_state=rng)/math.sqrt(p), dtype=np.float64)
    return _inverse_cdf_sampler(energy)(rng.random(n))

def init_ensemble(model: Model, n: int, *, seed: int, dt: float, gamma: float) -> SdeEnsemble:
    r"""
        An ensemble of ``n`` particles drawn exactly from :math:`\Theta=\mu\otimes\nu`.
        Initial draws use the stream of step :math:`-1`, which no time step uses.
    """
    validate(model, Model)
    validate(seed, int)
    if n < 1 or seed < 0:
        raise ConfigurationError(f"Error initialising ensemble: need n >= 1 and a non-negative seed (found {n}, {seed}).")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(2**32-1,))))
    x = sample_gibbs(model.potential, n, rng)
    v = sample_gibbs(model.kinetic, n, rng)
    return SdeEnsemble(x, v, seed, float(dt), float(gamma))

def _half_friction(model: Model, v: FloatArray, gamma: float, dt: float, xi: FloatArray) -> FloatArray:
    if gamma == 0.0:
        return v
    if model.kinetic.kind == "gaussian":
        decay = math.exp(-0.5*gamma*dt)
        return decay*v+math.sqrt(-math.expm1(-gamma*dt))*xi
    return v-0.5*gamma*model.kinetic.grad(v)*dt+math.sqrt(gamma*dt)*xi

def step_sde(ensemble: SdeEnsemble, model: Model) -> SdeEnsemble:
    r"""
        One splitting step: drift of positions, half friction-noise step, force kick, half friction-noise step.
        The friction-noise pair is the exact Ornstein–Uhlenbeck flow for Gaussian kinetic energies and
        Euler–Maruyama otherwise.

        :raises NonFiniteStateError: if a particle state becomes NaN or infinite
    """
    validate(ensemble, SdeEnsemble)
    validate(model, Model)
    dt, gamma = ensemble.dt, ensemble.gamma
    xi = _normals(ensemble.seed, ensemble.step, ensemble.size, 2)
    x = ensemble.x+model.kinetic.grad(ensemble.v)*dt
    v = _half_friction(model, ensemble.v, gamma, dt, xi[0])
    v = v-model.potential.grad(x)*dt
    v = _half_friction(model, v, gamma, dt, xi[1])
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
        bad = int(np.count_nonzero(~(np.isfinite(x) & np.isfinite(v))))
        raise NonFiniteStateError(f"Error at step {ensemble.step} (t = {ensemble.t:g}): {bad} particle states "
                                  f"are not finite.")
    return replace(ensemble, x=x, v=v, step=ensemble.step+1)

def centred_datum(model: Model, kind: InitialDatum) -> Callable[[FloatArray, FloatArray], FloatArray]:
    r"""
        The initial datum :math:`f(x)g(v)` minus its exact :math:`\Theta`-mean, evaluated pointwise.
    """
    f, g = datum_factors(kind)
    mean_f = integrate(lambda x: float(f(np.float64(x))), model.mu, model.quadrature)
    mean_g = integrate(lambda v: float(g(np.float64(v))), model.nu, model.quadrature)
    mean = mean_f*mean_g
    def h0(x: FloatArray, v: FloatArray) -> FloatArray:
        return np.asarray(f(x)*g(v)-mean, dtype=np.float64)
    return h0

@dataclass
class McSeries:
    r"""
        Monte Carlo autocovariance :math:`\hat c(t)=N^{-1}\sum_n h_0(Z^n_0)h_0(Z^n_t)` at the sample times, with
        jackknife standard errors and effective sample sizes. ``low_ess`` flags runs where some effective sample size
        falls below the threshold.
    """

    times: FloatArray
    c_hat: FloatArray
    stderr: FloatArray
    ess: FloatArray
    n_particles: int
    seed: int
    low_ess: bool

    def to_dict(self) -> Dict[str, object]:
        r""" A JSON-ready summary. """
        return {"n_particles": self.n_particles, "seed": self.seed, "low_ess": self.low_ess,
                "min_ess": float(np.min(self.ess)) if len(self.ess) else math.nan}

def jackknife(products: FloatArray, num_blocks: int = 20) -> Tuple[float, float]:
    r"""
        Mean of ``products`` and its delete-one-block jackknife standard error.

        >>> m, s = jackknife(np.zeros(100))
        >>> m, s
        (0.0, 0.0)

        :raises ConfigurationError: if fewer than 2 samples are given
    """
    n = len(products)
    if n < 2:
        raise ConfigurationError(f"Error estimating jackknife error: need at least 2 samples (found {n}).")
    num_blocks = max(2, min(num_blocks, n))
    sums = np.array([np.sum(chunk) for chunk in np.array_split(products, num_blocks)])
    counts = np.array([len(chunk) for chunk in np.array_split(products, num_blocks)])
    total = float(np.sum(sums))
    loo = (total-sums)/(n-counts)
    mean = total/n
    var = (num_blocks-1)/num_blocks*float(np.sum((loo-np.mean(loo))**2))
    return mean, math.sqrt(var)

def estimate_observable_decay(model: Model, gamma: float, t_final: float, *, n_particles: int, seed: int,
                              dt: float = 0.01, stride: int = 10, datum: InitialDatum = "tanh-x",
                              burn_in: float = 0.0) -> McSeries:
    r"""
        Evolves an ensemble started from :math:`\Theta` (optionally after a burn-in) and estimates the stationary
        autocovariance of the centred datum every ``stride`` steps.
    """
    # pylint: disable = too-many-arguments, too-many-locals
    validate(t_final, float)
    validate(stride, int)
    if not 0.0 < t_final < math.inf or stride < 1:
        raise ConfigurationError(f"Error estimating decay: need a positive final time and stride (found {t_final!r}, {stride}).")
    if n_particles < 2:
        raise ConfigurationError(f"Error estimating decay: need at least 2 particles (found {n_particles}).")
    ens = init_ensemble(model, n_particles, seed=seed, dt=dt, gamma=gamma)
    for _ in range(int(round(burn_in/dt))):
        ens = step_sde(ens, model)
    h0 = centred_datum(model, datum)
    start = h0(ens.x, ens.v)
    step0 = ens.step
    num_steps = int(math.ceil(t_final/dt-1e-9))
    times: List[float] = []
    c_hat: List[float] = []
    stderr: List[float] = []
    ess: List[float] = []
    def record() -> None:
        products = start*h0(ens.x, ens.v)
        mean, err = jackknife(products)
        naive = float(np.var(products, ddof=1))
        times.append((ens.step-step0)*dt)
        c_hat.append(mean)
        stderr.append(err)
        ess.append(naive/err**2 if err > 0.0 else float(n_particles))
    record()
    for k in range(1, num_steps+1):
        ens = step_sde(ens, model)
        if k % stride == 0 or k == num_steps:
            record()
    ess_arr = np.array(ess)
    low = bool(np.any(ess_arr < _ESS_THRESHOLD))
    if low:
        _log.warning("Effective sample size fell to %.0f (threshold %.0f) with %d particles",
                     float(np.min(ess_arr)), _ESS_THRESHOLD, n_particles)
    return McSeries(np.array(times), np.array(c_hat), np.array(stderr), ess_arr, n_particles, seed, low)

def run_ensemble(model: Model, ensemble: SdeEnsemble, num_steps: int,
                 observe: Optional[Callable[[SdeEnsemble], None]] = None) -> SdeEnsemble:
    r""" Advances an ensemble by ``num_steps`` steps, calling ``observe`` after each. """
    for _ in range(num_steps):
        ensemble = step_sde(ensemble, model)
        if observe is not None:
            observe(ensemble)
    return ensemble

__all__ = ("BLOCK_SIZE", "SdeEnsemble", "sample_gibbs", "init_ensemble", "step_sde", "run_ensemble",
           "centred_datum", "McSeries", "jackknife", "estimate_observable_decay")
