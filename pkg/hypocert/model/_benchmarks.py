r"""
    Benchmark models: a potential, a kinetic energy and a weight, wired together with their functional inequalities,
    and the validation of the standing assumptions on a grid.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

from dataclasses import dataclass, field
import logging
import math
from typing import Callable, List, Optional, Tuple

import numpy as np
from typing_validation import validate

from .err import AssumptionError, ConfigurationError, QuadratureError
from ._quadrature import DEFAULT_QUADRATURE, FloatArray, Measure, QuadratureCfg, integrate
from ._energies import Kinetic, KineticKind, Potential, PotentialKind
from ._weights import BetaDescriptor, VelocityInequality, VelocityInequalityKind, Weight, muckenhoupt_bound
from ._chang_cooper import spectral_gap

_log = logging.getLogger(__name__)

@dataclass(frozen=True)
class Model:
    r"""
        The model part of a scenario: potential :math:`\phi`, kinetic energy :math:`\psi` (with its velocity inequality),
        spatial weight :math:`W` and the quadrature configuration used for every derived integral.
    """

    potential: Potential
    kinetic: Kinetic
    weight: Weight
    quadrature: QuadratureCfg = DEFAULT_QUADRATURE

    def __post_init__(self) -> None:
        if self.potential.dim != self.kinetic.dim:
            raise ConfigurationError(f"Error assembling model: potential has dimension {self.potential.dim} "
                                     f"but kinetic energy has dimension {self.kinetic.dim}.")

    @property
    def dim(self) -> int:
        r""" Dimension :math:`d` of positions and velocities. """
        return self.potential.dim

    @property
    def mu(self) -> Measure:
        r""" Spatial equilibrium :math:`\mu`. """
        return self.potential.measure(self.quadrature)

    @property
    def nu(self) -> Measure:
        r""" Velocity equilibrium :math:`\nu`. """
        return self.kinetic.measure(self.quadrature)

    @property
    def mu_w(self) -> Measure:
        r""" Weighted spatial measure :math:`\mu_W`. """
        return self.weight.weighted_measure(self.mu, self.quadrature)

    @property
    def velocity(self) -> VelocityInequality:
        r""" The velocity inequality attached to the kinetic energy. """
        return self.kinetic.inequality

def _spatial_weight(potential: Potential, sigma: Optional[float], theta: Optional[float],
                    P_W: Optional[float], cfg: QuadratureCfg) -> Weight:
    kind, a = potential.kind, potential.param
    theta = 1.0 if theta is None else float(theta)
    if kind == "log":
        if sigma is None:
            sigma = a/2.0
        if not 0.0 < sigma < a:
            raise ConfigurationError(f"Error wiring weight for log potential with p = {a!r}: "
                                     f"moment exponent must lie in (0, p) (found {sigma!r}).")
        weight = Weight(1.0, float(sigma), theta)
        if P_W is not None:
            return weight.with_constant(P_W, "user-supplied")
        z_w = weight.normalizer(potential.measure(cfg), cfg)
        return weight.with_constant(2.0/(z_w*a), "closed-form")
    sigma = 4.0 if sigma is None else float(sigma)
    if potential.strongly_confining:
        weight = Weight(0.0, sigma, theta)
        if P_W is not None:
            return weight.with_constant(P_W, "user-supplied")
        if potential.dim != 1:
            raise ConfigurationError(f"Error wiring weight for {potential!r}: supply the Poincaré constant "
                                     f"explicitly in dimension {potential.dim}.")
        return weight.with_constant(1.0/spectral_gap(potential), "spectral-gap")
    weight = Weight(1.0-a, sigma, theta)
    if P_W is not None:
        return weight.with_constant(P_W, "user-supplied")
    if potential.dim != 1:
        raise ConfigurationError(f"Error wiring weight for {potential!r}: supply the weighted Poincaré constant "
                                 f"explicitly in dimension {potential.dim}.")
    z_w = weight.normalizer(potential.measure(cfg), cfg)
    return weight.with_constant(muckenhoupt_bound(potential, 1.0-a)/z_w, "muckenhoupt-numeric")

def _velocity_inequality(kinetic: Kinetic, active: Optional[VelocityInequalityKind], poincare: Optional[float],
                         delta_w: Optional[float], velocity_P: Optional[float], beta: Optional[BetaDescriptor],
                         cfg: QuadratureCfg) -> VelocityInequality:
    # pylint: disable = too-many-arguments, too-many-branches
    kind, b = kinetic.kind, kinetic.param
    weight: Optional[Weight] = None
    P_v: Optional[float] = None
    if kinetic.poincare_like:
        if poincare is None:
            if kind == "gaussian":
                poincare = 1.0
            elif kinetic.dim == 1:
                poincare = spectral_gap(kinetic)
            else:
                raise ConfigurationError(f"Error wiring velocity inequality for {kinetic!r}: supply the Poincaré "
                                         f"constant explicitly in dimension {kinetic.dim}.")
        default: VelocityInequalityKind = "poincare"
    else:
        nu = kinetic.measure(cfg)
        exponent = 1.0 if kind == "log" else 1.0-b
        if delta_w is None:
            delta_w = b/2.0 if kind == "log" else 4.0
        g = Weight(exponent, float(delta_w))
        z_g = g.normalizer(nu, cfg)
        if velocity_P is not None:
            g = g.with_constant(velocity_P, "user-supplied")
        elif kind == "log":
            g = g.with_constant(2.0/(z_g*b), "closed-form")
        elif kinetic.dim == 1:
            g = g.with_constant(muckenhoupt_bound(kinetic, exponent)/z_g, "muckenhoupt-numeric")
        else:
            raise ConfigurationError(f"Error wiring velocity inequality for {kinetic!r}: supply the weighted "
                                     f"Poincaré constant explicitly in dimension {kinetic.dim}.")
        weight = g
        if kind == "subexp" or b > 2.0:
            second = g.moment(nu, 2.0, cfg)
            P_v = z_g*g.P*(1.0+z_g*second)
        if beta is None:
            beta = BetaDescriptor("weighted")
        default = "weighted" if P_v is not None else "weak"
    if beta is not None and beta.kind != "weighted" and active is None:
        default = "weak"
    chosen = default if active is None else active
    if chosen == "weighted" and P_v is None:
        raise ConfigurationError(f"Error wiring velocity inequality for {kinetic!r}: the weighted inequality "
                                 f"needs a square-integrable velocity weight, which this kinetic energy lacks.")
    return VelocityInequality(chosen, poincare, weight, P_v, beta)

def make_benchmark(potential_kind: PotentialKind, potential_param: float,
                   kinetic_kind: KineticKind, kinetic_param: Optional[float] = None, dim: int = 1, *,
                   sigma: Optional[float] = None, theta: Optional[float] = None, P_W: Optional[float] = None,
                   velocity: Optional[VelocityInequalityKind] = None, velocity_poincare: Optional[float] = None,
                   delta_w: Optional[float] = None, velocity_P: Optional[float] = None,
                   velocity_beta: Optional[BetaDescriptor] = None,
                   quadrature: QuadratureCfg = DEFAULT_QUADRATURE) -> Model:
    r"""
        Wires a benchmark model.

        - Sub-exponential potentials with :math:`\alpha<1` get :math:`W=\langle x\rangle^{1-\alpha}`, default :math:`\sigma=4`,
          and :math:`P_W` from a Muckenhoupt bound.
        - Logarithmic potentials get :math:`W=\langle x\rangle`, :math:`\sigma\in(0,p)` (default :math:`p/2`)
          and :math:`P_W = 2Z_W^{-1}/p`.
        - Strongly confining potentials (:math:`\alpha\geq 1`) get :math:`W\equiv 1` and :math:`P_W = 1/C_{P,\mu}`.
        - Gaussian kinetic energies satisfy a Poincaré inequality with :math:`C_{P,\nu}=1`; sub-exponential ones with
          :math:`\delta\geq 1` get the numeric spectral gap; the others get a velocity weight :math:`\mathcal{G}`
          and the weak Poincaré function it implies.

        >>> model = make_benchmark("log", 2.0, "gaussian")
        >>> model.weight.exponent, model.weight.sigma
        (1.0, 1.0)

        :raises ConfigurationError: if parameters are out of range
    """
    # pylint: disable = too-many-arguments, too-many-locals
    validate(potential_kind, PotentialKind)
    validate(kinetic_kind, KineticKind)
    validate(dim, int)
    validate(quadrature, QuadratureCfg)
    for name, value in (("sigma", sigma), ("theta", theta), ("P_W", P_W), ("velocity_poincare", velocity_poincare),
                        ("delta_w", delta_w), ("velocity_P", velocity_P)):
        if value is not None and not 0.0 < value < math.inf:
            raise ConfigurationError(f"Error wiring benchmark: {name} must be positive and finite (found {value!r}).")
    if potential_param <= 0.0:
        raise ConfigurationError(f"Error wiring benchmark: potential parameter must be positive (found {potential_param!r}).")
    potential = Potential(potential_kind, float(potential_param), dim)
    kinetic = Kinetic(kinetic_kind, kinetic_param, dim)
    if kinetic_kind == "log" and delta_w is not None and delta_w >= kinetic.param:
        raise ConfigurationError(f"Error wiring benchmark: velocity moment exponent must lie in (0, q) (found {delta_w!r}).")
    weight = _spatial_weight(potential, sigma, theta, P_W, quadrature)
    inequality = _velocity_inequality(kinetic, velocity, velocity_poincare, delta_w, velocity_P, velocity_beta, quadrature)
    _log.info("Wired %r with %r: weight exponent %g, sigma %g, P_W %g (%s), velocity inequality %s",
              potential, kinetic, weight.exponent, weight.sigma, weight.P, weight.provenance, inequality.active)
    return Model(potential, kinetic.with_inequality(inequality), weight, quadrature)

@dataclass(frozen=True)
class AssumptionCheck:
    r"""
        One line of an :class:`AssumptionReport`: the worst observed value of a checked quantity against its bound,
        with the grid point where it occurs (when the check is pointwise).
    """

    name: str
    passed: bool
    worst: float
    bound: float
    witness: Optional[float] = None

    def __str__(self) -> str:
        status = "pass" if self.passed else "FAIL"
        where = "" if self.witness is None else f" at {self.witness:g}"
        return f"{status} {self.name}: {self.worst:.6g} vs {self.bound:.6g}{where}"

@dataclass(frozen=True)
class AssumptionReport:
    r"""
        Outcome of :func:`validate_assumptions`.
    """

    checks: Tuple[AssumptionCheck, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        r""" Whether every check passed. """
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> Tuple[AssumptionCheck, ...]:
        r""" The failed checks. """
        return tuple(c for c in self.checks if not c.passed)

    def __getitem__(self, name: str) -> AssumptionCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def raise_if_failed(self) -> None:
        r"""
            :raises AssumptionError: if any check failed
        """
        if not self.passed:
            names = ", ".join(c.name for c in self.failures)
            raise AssumptionError(f"Error validating model assumptions: failed {names}.\n{self}", self)

    def __str__(self) -> str:
        return "\n".join(str(c) for c in self.checks)

def validation_grid(dim: int) -> FloatArray:
    r""" Points (radii in dimension :math:`d>1`) at which pointwise assumptions are spot-checked. """
    core = np.linspace(0.0, 10.0, 2001)
    far = np.geomspace(10.0, 1e6, 500)
    radii = np.concatenate([core, far])
    if dim == 1:
        return np.concatenate([-radii[::-1], radii])
    return radii

def _pointwise(name: str, grid: FloatArray, values: FloatArray, bound: float) -> AssumptionCheck:
    k = int(np.argmax(values))
    worst = float(values[k])
    slack = 1e-12*max(1.0, abs(bound))
    return AssumptionCheck(name, worst <= bound+slack, worst, bound, float(grid[k]))

def _finite(name: str, compute: Callable[[], float], lower: float = 0.0, upper: float = math.inf) -> AssumptionCheck:
    try:
        value = compute()
    except QuadratureError as e:
        _log.info("Assumption check %s failed to converge: %s", name, e)
        return AssumptionCheck(name, False, math.inf, upper)
    return AssumptionCheck(name, lower < value < upper, value, upper)

def validate_assumptions(model: Model, cfg: Optional[QuadratureCfg] = None) -> AssumptionReport:
    r"""
        Spot-checks the standing assumptions on the model:

        - :math:`W\geq 1` and :math:`|\nabla W|/W\leq\theta_W` on the validation grid;
        - :math:`|\nabla\phi|\leq L` and the Hessian eigenvalues of :math:`\phi` within :math:`[-M,M]`;
        - finiteness of :math:`\int W^\sigma d\mu`, :math:`\int |\nabla\psi|^4 d\nu`, :math:`\int |\nabla^2\psi|^2 d\nu`
          and positivity of :math:`\int|\nabla\psi|^2 d\nu`;
        - normalization of :math:`\mu`, :math:`\nu` and :math:`\mu_W`, and :math:`Z_W\in(0,1]`.

        Failures are reported, never raised; see :meth:`AssumptionReport.raise_if_failed`.
    """
    validate(model, Model)
    if cfg is None:
        cfg = model.quadrature
    grid = validation_grid(model.dim)
    phi, psi, weight = model.potential, model.kinetic, model.weight
    d = model.dim
    checks: List[AssumptionCheck] = []
    checks.append(_pointwise("weight lower bound", grid, 1.0-weight.value(grid), 0.0))
    checks.append(_pointwise("weight log-gradient", grid, weight.log_grad(grid), weight.theta))
    if math.isfinite(phi.lipschitz):
        checks.append(_pointwise("potential gradient", grid, np.abs(phi.grad(grid)), phi.lipschitz))
    else:
        checks.append(AssumptionCheck("potential gradient", False, math.inf, math.inf))
    radial, tangential = phi.hessian(grid)
    hess = np.abs(radial) if d == 1 else np.maximum(np.abs(radial), np.abs(tangential))
    checks.append(_pointwise("potential hessian", grid, hess, phi.hessian_bound))
    mu, nu = phi.measure(cfg), psi.measure(cfg)
    checks.append(_finite("weight moment", lambda: weight.moment(mu, None, cfg)))
    def grad4(v: float) -> float:
        return float(psi.grad(np.float64(v)))**4
    def hess2(v: float) -> float:
        r, t = psi.hessian(np.float64(v))
        return float(r)**2+(d-1)*float(t)**2
    def grad2(v: float) -> float:
        return float(psi.grad(np.float64(v)))**2
    checks.append(_finite("kinetic gradient fourth moment", lambda: integrate(grad4, nu, cfg)))
    checks.append(_finite("kinetic hessian second moment", lambda: integrate(hess2, nu, cfg)))
    checks.append(_finite("kinetic gradient second moment", lambda: integrate(grad2, nu, cfg)))
    tol = 10.0*max(cfg.abs_tol, cfg.rel_tol)+10.0*cfg.tail
    for name, measure in (("mu", mu), ("nu", nu)):
        total = integrate(lambda _: 1.0, measure, cfg)
        checks.append(AssumptionCheck(f"normalization of {name}", abs(total-1.0) <= tol, abs(total-1.0), tol))
    z_w = weight.normalizer(mu, cfg)
    checks.append(AssumptionCheck("weight normalizer", 0.0 < z_w <= 1.0, z_w, 1.0))
    mu_w = weight.weighted_measure(mu, cfg)
    total = integrate(lambda _: 1.0, mu_w, cfg)
    checks.append(AssumptionCheck("normalization of mu_W", abs(total-1.0) <= tol, abs(total-1.0), tol))
    report = AssumptionReport(tuple(checks))
    if not report.passed:
        _log.warning("Assumption checks failed for %r, %r:\n%s", phi, psi, report)
    return report

__all__ = ("Model", "make_benchmark", "AssumptionCheck", "AssumptionReport", "validate_assumptions", "validation_grid")
