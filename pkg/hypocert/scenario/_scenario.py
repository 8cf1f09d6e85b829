r"""
    Scenarios: a benchmark model together with the friction, window, regime, solver and particle settings of a run.

    A scenario document is a JSON map; parsing fills defaults and checks every value, reporting problems at their
    object path. The canonical emission of a parsed scenario (see :func:`~hypocert.scenario.encode`) is its identity.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

from dataclasses import dataclass, field, replace
import math
from typing import Any, Callable, Dict, Optional, Set, Tuple, Type, Union

from typing_validation import validate

from ..model import (DEFAULT_QUADRATURE, BetaDescriptor, BetaKind, ConfigurationError, KineticKind, Model,
                     PotentialKind, QuadratureCfg, VelocityInequalityKind, make_benchmark)
from ..rates import Regime
from ..solver import InitialDatum
from .err import ScenarioDecodingError
from ._codec import content_id, decode, encode
from ._path import JSONValue, ScenarioPath

SCHEMA_VERSION = 1
r"""
    Value of the ``"spec"`` field carried by every scenario and output document.
"""

POTENTIAL_PARAM_KEYS: Dict[str, str] = {"log": "p", "subexp": "alpha"}
r"""
    Key of the shape parameter in the ``"potential"`` map, by potential kind.
"""

KINETIC_PARAM_KEYS: Dict[str, str] = {"log": "q", "subexp": "delta"}
r"""
    Key of the shape parameter in the ``"kinetic"`` map, by kinetic kind. Gaussian kinetic energies take none.
"""

@dataclass(frozen=True)
class ModelSpec:
    r"""
        The model fragment of a scenario, as arguments to :func:`~hypocert.model.make_benchmark`.
        Unset optional values are derived when the model is built.
    """

    potential_kind: PotentialKind = "log"
    potential_param: float = 2.0
    kinetic_kind: KineticKind = "gaussian"
    kinetic_param: Optional[float] = None
    dim: int = 1
    sigma: Optional[float] = None
    theta: Optional[float] = None
    P_W: Optional[float] = None
    velocity: Optional[VelocityInequalityKind] = None
    velocity_poincare: Optional[float] = None
    delta_w: Optional[float] = None
    velocity_P: Optional[float] = None
    velocity_beta: Optional[BetaDescriptor] = None
    quadrature_tol: float = DEFAULT_QUADRATURE.rel_tol
    quadrature_tail: float = DEFAULT_QUADRATURE.tail

    @property
    def quadrature(self) -> QuadratureCfg:
        r"""
            Quadrature settings: :attr:`quadrature_tol` is the relative tolerance, the absolute one is a hundredth of it.

            >>> ModelSpec().quadrature == DEFAULT_QUADRATURE
            True

            :raises ConfigurationError: if the tolerances are out of range
        """
        if self.quadrature_tol == DEFAULT_QUADRATURE.rel_tol and self.quadrature_tail == DEFAULT_QUADRATURE.tail:
            return DEFAULT_QUADRATURE
        return replace(DEFAULT_QUADRATURE, rel_tol=self.quadrature_tol, abs_tol=self.quadrature_tol/100.0,
                       tail=self.quadrature_tail)

    def build(self) -> Model:
        r""" Wires the model. """
        return make_benchmark(self.potential_kind, self.potential_param, self.kinetic_kind, self.kinetic_param,
                              self.dim, sigma=self.sigma, theta=self.theta, P_W=self.P_W, velocity=self.velocity,
                              velocity_poincare=self.velocity_poincare, delta_w=self.delta_w,
                              velocity_P=self.velocity_P, velocity_beta=self.velocity_beta,
                              quadrature=self.quadrature)

    def to_json(self) -> Dict[str, JSONValue]:
        r""" The JSON map of this fragment. """
        beta: JSONValue = None
        if self.velocity_beta is not None:
            beta = {"kind": self.velocity_beta.kind, "params": list(self.velocity_beta.params)}
        kinetic: Dict[str, JSONValue] = {"kind": self.kinetic_kind}
        if self.kinetic_kind in KINETIC_PARAM_KEYS:
            kinetic[KINETIC_PARAM_KEYS[self.kinetic_kind]] = self.kinetic_param
        return {
            "d": self.dim,
            "sigma": self.sigma,
            "potential": {"kind": self.potential_kind, POTENTIAL_PARAM_KEYS[self.potential_kind]: self.potential_param},
            "kinetic": kinetic,
            "weight": {"theta": self.theta, "P_W": self.P_W},
            "quadrature": {"tol": self.quadrature_tol, "tail": self.quadrature_tail},
            "velocity": {"active": self.velocity, "poincare": self.velocity_poincare, "delta_w": self.delta_w,
                         "P": self.velocity_P, "beta": beta},
        }

@dataclass(frozen=True)
class SolverSettings:
    r"""
        Finite-volume settings: cells per axis, final time, time step (``None`` for the stable default),
        output stride, cutoffs (``None`` for the tail-mass defaults), step safety factor and initial datum.
    """

    nx: int = 128
    nv: int = 128
    t_final: float = 50.0
    dt: Optional[float] = None
    stride: int = 10
    x_max: Optional[float] = None
    v_max: Optional[float] = None
    cfl: float = 0.9
    datum: InitialDatum = "tanh-x"

    def to_json(self) -> Dict[str, JSONValue]:
        r""" The JSON map of these settings. """
        return {"nx": self.nx, "nv": self.nv, "t_final": self.t_final, "dt": self.dt, "stride": self.stride,
                "x_max": self.x_max, "v_max": self.v_max, "cfl": self.cfl, "datum": self.datum}

@dataclass(frozen=True)
class McSettings:
    r"""
        Particle settings for the autocovariance cross-check.
    """

    particles: int = 100_000
    dt: float = 0.01
    t_final: float = 10.0
    stride: int = 10
    burn_in: float = 0.0

    def to_json(self) -> Dict[str, JSONValue]:
        r""" The JSON map of these settings. """
        return {"particles": self.particles, "dt": self.dt, "t_final": self.t_final, "stride": self.stride,
                "burn_in": self.burn_in}

@dataclass(frozen=True)
class Scenario:
    r"""
        A complete run configuration.

        >>> s = Scenario(name="log2-gauss")
        >>> parse_scenario(s.emit()) == s
        True
        >>> s.scenario_id == parse_scenario(s.emit()).scenario_id
        True
    """

    name: str = "scenario"
    model: ModelSpec = field(default_factory=ModelSpec)
    gamma: float = 1.0
    tau: float = 1.0
    h_inf: float = 1.0
    regime: Optional[Regime] = None
    a: Optional[float] = None
    C_PL: Optional[float] = None
    seed: int = 0
    solver: SolverSettings = field(default_factory=SolverSettings)
    mc: McSettings = field(default_factory=McSettings)

    def to_json(self) -> Dict[str, JSONValue]:
        r""" The JSON map of this scenario, with every default filled in. """
        return {"spec": SCHEMA_VERSION, "name": self.name, "model": self.model.to_json(), "gamma": self.gamma,
                "tau": self.tau, "h_inf": self.h_inf, "regime": self.regime, "a": self.a, "C_PL": self.C_PL,
                "seed": self.seed, "solver": self.solver.to_json(), "mc": self.mc.to_json()}

    def emit(self, *, indent: int = 0) -> bytes:
        r""" Canonical JSON bytes (pretty-printed, and then not canonical, when ``indent`` is positive). """
        return encode(self.to_json(), indent=indent)

    @property
    def scenario_id(self) -> str:
        r""" The content identifier of the canonical bytes, as a base32 CIDv1 string. """
        return str(content_id(self.to_json()))

    def with_tau(self, tau: float) -> Scenario:
        r""" The same scenario with another window :math:`\tau`. """
        return replace(self, tau=float(tau))

    def with_seed(self, seed: int) -> Scenario:
        r""" The same scenario with another seed. """
        return replace(self, seed=int(seed))

    def build_model(self) -> Model:
        r"""
            Wires the model of the scenario.

            :raises ScenarioDecodingError: if the model parameters are inconsistent
        """
        try:
            return self.model.build()
        except ConfigurationError as e:
            raise ScenarioDecodingError(f"Error building model at /model: {e}") from e

def scenario_id(scenario: Scenario) -> str:
    r""" The content identifier of a scenario, see :attr:`Scenario.scenario_id`. """
    validate(scenario, Scenario)
    return scenario.scenario_id

Check = Callable[[Any], Optional[str]]

def _positive(value: Any) -> Optional[str]:
    return None if value > 0 else "must be positive"

def _non_negative(value: Any) -> Optional[str]:
    return None if value >= 0 else "must be non-negative"

def _at_least(bound: int) -> Check:
    def check(value: Any) -> Optional[str]:
        return None if value >= bound else f"must be at least {bound}"
    return check

def _one_of(kind: Any) -> Check:
    def check(value: Any) -> Optional[str]:
        try:
            validate(value, kind)
        except TypeError:
            return f"must be one of {', '.join(repr(a) for a in kind.__args__)}"
        return None
    return check

_Kinds = Union[Type[Any], Tuple[Type[Any], ...]]

class _Reader:
    r"""
        Reads the fields of one JSON map, tracking which keys were consumed.
    """

    _obj: Dict[str, JSONValue]
    _path: ScenarioPath
    _seen: Set[str]

    def __init__(self, value: JSONValue, path: ScenarioPath) -> None:
        if not isinstance(value, dict):
            raise ScenarioDecodingError(f"Error decoding scenario at {path}: expected a map "
                                        f"(found {type(value).__name__}).")
        self._obj = value
        self._path = path
        self._seen = set()

    @property
    def path(self) -> ScenarioPath:
        r""" Path of the map being read. """
        return self._path

    def raw(self, key: str) -> JSONValue:
        r""" The raw value at a key, ``None`` if missing. """
        self._seen.add(key)
        return self._obj.get(key)

    def get(self, key: str, kind: _Kinds, default: Any, *, nullable: bool = False, check: Optional[Check] = None) -> Any:
        r""" The value at a key, converted and checked, or the default if missing. """
        # pylint: disable = too-many-arguments
        self._seen.add(key)
        path = self._path/key
        if key not in self._obj:
            return default
        value = self._obj[key]
        if value is None:
            if nullable:
                return None
            raise ScenarioDecodingError(f"Error decoding scenario at {path}: value cannot be null.")
        if kind is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if isinstance(value, bool) and kind is not bool:
            raise ScenarioDecodingError(f"Error decoding scenario at {path}: expected {_kind_name(kind)}, found a boolean.")
        if not isinstance(value, kind):
            raise ScenarioDecodingError(f"Error decoding scenario at {path}: expected {_kind_name(kind)} "
                                        f"(found {type(value).__name__}).")
        if isinstance(value, float) and not math.isfinite(value):
            raise ScenarioDecodingError(f"Error decoding scenario at {path}: value must be finite.")
        if check is not None:
            problem = check(value)
            if problem is not None:
                raise ScenarioDecodingError(f"Error decoding scenario at {path}: value {value!r} {problem}.")
        return value

    def sub(self, key: str) -> Optional[_Reader]:
        r""" A reader for the map at a key, or ``None`` if the key is missing or null. """
        value = self.raw(key)
        if value is None:
            return None
        return _Reader(value, self._path/key)

    def finish(self) -> None:
        r""" Rejects keys which were not read. """
        unknown = sorted(set(self._obj)-self._seen)
        if unknown:
            raise ScenarioDecodingError(f"Error decoding scenario at {self._path/unknown[0]}: unknown key.")

def _kind_name(kind: _Kinds) -> str:
    if isinstance(kind, tuple):
        return " or ".join(k.__name__ for k in kind)
    return {"float": "a number", "int": "an integer", "str": "a string", "bool": "a boolean"}.get(kind.__name__,
                                                                                              kind.__name__)

def _parse_beta(r: _Reader, key: str) -> Optional[BetaDescriptor]:
    sub = r.sub(key)
    if sub is None:
        return None
    kind: BetaKind = sub.get("kind", str, None, check=_one_of(BetaKind))
    if kind is None:
        raise ScenarioDecodingError(f"Error decoding scenario at {sub.path/'kind'}: value is required.")
    raw = sub.raw("params")
    params_raw = [] if raw is None else raw
    if not isinstance(params_raw, list):
        raise ScenarioDecodingError(f"Error decoding scenario at {sub.path/'params'}: expected a list.")
    params = []
    for idx, p in enumerate(params_raw):
        if isinstance(p, bool) or not isinstance(p, (int, float)) or not 0.0 < p < math.inf:
            raise ScenarioDecodingError(f"Error decoding scenario at {sub.path/'params'/idx}: expected a positive number.")
        params.append(float(p))
    sub.finish()
    try:
        return BetaDescriptor(kind, tuple(params))
    except ConfigurationError as e:
        raise ScenarioDecodingError(f"Error decoding scenario at {sub.path}: {e}") from e

def _parse_model(r: Optional[_Reader]) -> ModelSpec:
    d = ModelSpec()
    if r is None:
        return d
    pot, kin, wt, vel, quad = (r.sub("potential"), r.sub("kinetic"), r.sub("weight"), r.sub("velocity"),
                               r.sub("quadrature"))
    potential_kind: PotentialKind = d.potential_kind
    potential_param = d.potential_param
    if pot is not None:
        potential_kind = pot.get("kind", str, d.potential_kind, check=_one_of(PotentialKind))
        potential_param = pot.get(POTENTIAL_PARAM_KEYS[potential_kind], float, d.potential_param, check=_positive)
    kinetic_kind: KineticKind = d.kinetic_kind
    kinetic_param: Optional[float] = None
    if kin is not None:
        kinetic_kind = kin.get("kind", str, d.kinetic_kind, check=_one_of(KineticKind))
        if kinetic_kind in KINETIC_PARAM_KEYS:
            kinetic_param = kin.get(KINETIC_PARAM_KEYS[kinetic_kind], float, None, nullable=True, check=_positive)
    spec = ModelSpec(
        potential_kind=potential_kind,
        potential_param=potential_param,
        kinetic_kind=kinetic_kind,
        kinetic_param=kinetic_param,
        dim=r.get("d", int, d.dim, check=_at_least(1)),
        sigma=r.get("sigma", float, None, nullable=True, check=_positive),
        theta=wt.get("theta", float, None, nullable=True, check=_positive) if wt else None,
        P_W=wt.get("P_W", float, None, nullable=True, check=_positive) if wt else None,
        velocity=vel.get("active", str, None, nullable=True, check=_one_of(VelocityInequalityKind)) if vel else None,
        velocity_poincare=vel.get("poincare", float, None, nullable=True, check=_positive) if vel else None,
        delta_w=vel.get("delta_w", float, None, nullable=True, check=_positive) if vel else None,
        velocity_P=vel.get("P", float, None, nullable=True, check=_positive) if vel else None,
        velocity_beta=_parse_beta(vel, "beta") if vel else None,
        quadrature_tol=quad.get("tol", float, d.quadrature_tol, check=_positive) if quad else d.quadrature_tol,
        quadrature_tail=quad.get("tail", float, d.quadrature_tail, check=_positive) if quad else d.quadrature_tail,
    )
    for sub in (pot, kin, wt, vel, quad):
        if sub is not None:
            sub.finish()
    r.finish()
    if spec.kinetic_kind in KINETIC_PARAM_KEYS and spec.kinetic_param is None:
        key = KINETIC_PARAM_KEYS[spec.kinetic_kind]
        raise ScenarioDecodingError(f"Error decoding scenario at {r.path/'kinetic'/key}: "
                                    f"kinetic energy of kind {spec.kinetic_kind!r} needs a parameter.")
    try:
        _ = spec.quadrature
    except ConfigurationError as e:
        raise ScenarioDecodingError(f"Error decoding scenario at {r.path/'quadrature'}: {e}") from e
    return spec

def _parse_solver(r: Optional[_Reader]) -> SolverSettings:
    d = SolverSettings()
    if r is None:
        return d
    settings = SolverSettings(
        nx=r.get("nx", int, d.nx, check=_at_least(4)),
        nv=r.get("nv", int, d.nv, check=_at_least(4)),
        t_final=r.get("t_final", float, d.t_final, check=_positive),
        dt=r.get("dt", float, None, nullable=True, check=_positive),
        stride=r.get("stride", int, d.stride, check=_at_least(1)),
        x_max=r.get("x_max", float, None, nullable=True, check=_positive),
        v_max=r.get("v_max", float, None, nullable=True, check=_positive),
        cfl=r.get("cfl", float, d.cfl, check=lambda c: None if 0.0 < c <= 1.0 else "must lie in (0, 1]"),
        datum=r.get("datum", str, d.datum, check=_one_of(InitialDatum)),
    )
    r.finish()
    return settings

def _parse_mc(r: Optional[_Reader]) -> McSettings:
    d = McSettings()
    if r is None:
        return d
    settings = McSettings(
        particles=r.get("particles", int, d.particles, check=_at_least(2)),
        dt=r.get("dt", float, d.dt, check=_positive),
        t_final=r.get("t_final", float, d.t_final, check=_positive),
        stride=r.get("stride", int, d.stride, check=_at_least(1)),
        burn_in=r.get("burn_in", float, d.burn_in, check=_non_negative),
    )
    r.finish()
    return settings

def parse_scenario(data: Union[bytes, str, Dict[str, JSONValue]]) -> Scenario:
    r"""
        Parses a scenario document, filling defaults for missing values.

        >>> s = parse_scenario(b'{"name": "demo", "solver": {"nx": 32, "nv": 32, "t_final": 1}}')
        >>> s.solver.nx, s.solver.t_final, s.gamma
        (32, 1.0, 1.0)

        :raises ScenarioDecodingError: if the document is not valid JSON, has unknown keys,
                                       or a value has the wrong kind or range; the message names its path
    """
    value: JSONValue = data if isinstance(data, dict) else decode(data)
    r = _Reader(value, ScenarioPath())
    version = r.get("spec", int, SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ScenarioDecodingError(f"Error decoding scenario at /spec: unsupported version {version} "
                                    f"(expected {SCHEMA_VERSION}).")
    d = Scenario()
    scenario = Scenario(
        name=r.get("name", str, d.name),
        model=_parse_model(r.sub("model")),
        gamma=r.get("gamma", float, d.gamma, check=_positive),
        tau=r.get("tau", float, d.tau, check=_positive),
        h_inf=r.get("h_inf", float, d.h_inf, check=_positive),
        regime=r.get("regime", str, None, nullable=True, check=_one_of(Regime)),
        a=r.get("a", float, None, nullable=True, check=lambda a: None if 0.0 < a <= 0.25 else "must lie in (0, 1/4]"),
        C_PL=r.get("C_PL", float, None, nullable=True, check=_positive),
        seed=r.get("seed", int, d.seed, check=_non_negative),
        solver=_parse_solver(r.sub("solver")),
        mc=_parse_mc(r.sub("mc")),
    )
    r.finish()
    return scenario

__all__ = ("SCHEMA_VERSION", "POTENTIAL_PARAM_KEYS", "KINETIC_PARAM_KEYS",
           "ModelSpec", "SolverSettings", "McSettings", "Scenario", "scenario_id", "parse_scenario")
