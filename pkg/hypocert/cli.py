r"""
    Command line front-end: certificates, decay simulations, audits and tables for scenario documents.

    Every output document carries the schema version ``"spec": 1`` and the scenario identifier.
    The exit code is 0 when no audit fails and no error occurs, 1 when an audit fails or the model assumptions
    do not hold, and 2 on configuration errors.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

import argparse
import csv
from dataclasses import asdict, dataclass, field
import logging
import math
from pathlib import Path
import time
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple
from typing_extensions import Literal

import numpy as np

from .model import AssumptionError, ConfigurationError, HypocertError, Model, validate_assumptions
from .rates import (RateCertificate, certify, fit_exponent, model_constants, model_exponent, overdamped_exponent,
                    table1_exponent)
from .scenario import SCHEMA_VERSION, JSONValue, Scenario, encode, parse_scenario
from .solver import (DecaySeries, DiscretizationBudget, McSeries, cross_validate, domination_check,
                     estimate_observable_decay, make_grid, richardson_budget, run_decay, weak_dissipation_check)
from .weakpi import BetaFn, beta_kin, beta_tail_x, beta_velocity, chain, legendre_kstar, rate_function

_log = logging.getLogger(__name__)

SERIES_COLUMNS = ("t", "l2_sq", "linf", "osc", "H_tau", "D_tau", "energy_residual", "envelope", "dominated")
r"""
    Columns of the decay series CSV.
"""

Verdict = Literal["pass", "fail", "skipped"]

REPORT_COLUMNS = ("scenario_id", "name", "symbolic_exponent", "certified_exponent", "simulated_exponent",
                  "domination", "weak_dissipation", "worst_margin", "cross_validation", "verdict", "reason")

@dataclass
class ReportRow:
    r"""
        The outcome of auditing one scenario. Verdicts are ``"pass"``, ``"fail"`` or ``"skipped"``,
        the latter with a reason.
    """

    scenario_id: str
    name: str
    symbolic_exponent: str
    certified_exponent: Optional[float] = None
    simulated_exponent: Optional[float] = None
    domination: Verdict = "skipped"
    weak_dissipation: Verdict = "skipped"
    worst_margin: Optional[float] = None
    cross_validation: Verdict = "skipped"
    reason: str = ""
    runtimes: Dict[str, float] = field(default_factory=dict)

    @property
    def verdict(self) -> Verdict:
        r""" ``"fail"`` if any audit failed, ``"skipped"`` if all were skipped, ``"pass"`` otherwise. """
        verdicts = (self.domination, self.weak_dissipation, self.cross_validation)
        if "fail" in verdicts:
            return "fail"
        if all(v == "skipped" for v in verdicts):
            return "skipped"
        return "pass"

    def to_json(self) -> Dict[str, JSONValue]:
        r""" The JSON map of this row, with the schema version and the overall verdict. """
        data: Dict[str, Any] = asdict(self)
        data["spec"] = SCHEMA_VERSION
        data["verdict"] = self.verdict
        return _jsonable(data)

    def csv_row(self) -> List[str]:
        r""" Cells for :data:`REPORT_COLUMNS`. """
        data = self.to_json()
        return [_cell(data[k]) for k in REPORT_COLUMNS]

def _jsonable(value: Any) -> Any:
    # nan and infinities become null
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None
    return value

def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)

def _write_json(path: Path, value: Any) -> None:
    path.write_bytes(encode(_jsonable(value), indent=2)+b"\n")
    _log.info("Wrote %s", path)

def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(float(x)) if isinstance(x, (float, np.floating)) else _cell(x) for x in row])
    _log.info("Wrote %s", path)

def _envelope_times(t_final: float) -> np.ndarray:
    return np.concatenate([[0.0], np.geomspace(1e-2, max(t_final, 1.0)*1e4, 120)])

def _certificate(model: Model, scenario: Scenario, oscillation: Optional[float] = None) -> RateCertificate:
    cert = certify(model, scenario.gamma, scenario.tau, regime=scenario.regime, h_inf=scenario.h_inf,
                   oscillation=oscillation, C_PL=scenario.C_PL, a=scenario.a)
    return cert.with_scenario_id(scenario.scenario_id)

def _weighted_regime(model: Model, scenario: Scenario) -> bool:
    # appendixA and overdamped certificates do not use the weighted constants
    if scenario.regime is not None:
        return scenario.regime not in ("appendixA", "overdamped")
    return math.isfinite(model.potential.lipschitz)

def cmd_certify(scenario: Scenario, out: Path) -> Dict[str, Any]:
    r"""
        Validates the model assumptions, computes the constants and the certificate of the scenario,
        and writes ``certificate.json``.

        :raises AssumptionError: if the model fails its standing assumptions
    """
    model = scenario.build_model()
    report = validate_assumptions(model)
    if _weighted_regime(model, scenario):
        report.raise_if_failed()
    cert = _certificate(model, scenario)
    exponent = model_exponent(model)
    doc: Dict[str, Any] = {
        "spec": SCHEMA_VERSION,
        "scenario_id": scenario.scenario_id,
        "name": scenario.name,
        "symbolic_exponent": {"kind": exponent.kind, "r": exponent.r, "symbol": exponent.symbol},
        "constants": dict(cert.constants),
        "certificate": cert.tabulate(_envelope_times(scenario.solver.t_final)),
    }
    _write_json(out/"certificate.json", doc)
    return doc

def _series_rows(series: DecaySeries, cert: Optional[RateCertificate],
                 budget: float) -> Iterable[Tuple[Any, ...]]:
    envelope = cert.envelope(series.times) if cert is not None else np.full(len(series.times), math.nan)
    bound = cert.bound(series.times) if cert is not None else None
    for k, t in enumerate(series.times):
        dominated: Any = None if bound is None else bool(series.l2_sq[k] <= bound[k]+budget)
        yield (t, series.l2_sq[k], series.linf[k], series.osc[k], series.H_tau[k], series.D_tau[k],
               series.energy_residual[k], envelope[k], dominated)

def _simulate(scenario: Scenario, model: Model, refine: int) -> Tuple[DecaySeries, DiscretizationBudget]:
    s = scenario.solver
    grid = make_grid(model, s.nx, s.nv, x_max=s.x_max, v_max=s.v_max)
    series = run_decay(model, grid, scenario.gamma, s.t_final, tau=scenario.tau, datum=s.datum, dt=s.dt,
                       stride=s.stride, cfl=s.cfl)
    budget = richardson_budget(series, model, grid, scenario.gamma, datum=s.datum, levels=refine, stride=s.stride)
    return series, budget

def _run_mc(scenario: Scenario, model: Model) -> McSeries:
    m = scenario.mc
    return estimate_observable_decay(model, scenario.gamma, m.t_final, n_particles=m.particles, seed=scenario.seed,
                                     dt=m.dt, stride=m.stride, datum=scenario.solver.datum, burn_in=m.burn_in)

def cmd_simulate(scenario: Scenario, out: Path, *, refine: int = 1, mc: bool = False) -> DecaySeries:
    r"""
        Runs the decay simulation and writes ``series.csv`` with :data:`SERIES_COLUMNS` and a ``series.json`` summary;
        with ``mc``, also the particle estimate ``mc.csv``.
    """
    model = scenario.build_model()
    series, budget = _simulate(scenario, model, refine)
    cert: Optional[RateCertificate]
    try:
        cert = _certificate(model, scenario, series.initial_oscillation)
    except ConfigurationError as e:
        _log.warning("No certificate for envelope columns: %s", e)
        cert = None
    _write_csv(out/"series.csv", SERIES_COLUMNS, _series_rows(series, cert, budget.l2))
    summary: Dict[str, Any] = {"spec": SCHEMA_VERSION, "scenario_id": scenario.scenario_id, "name": scenario.name,
                               "dt": series.dt, "tau": series.tau, "dropped_windows": series.dropped_windows,
                               "budget": {"l2": budget.l2, "H_tau": budget.H_tau, "pairing": budget.pairing,
                                          "refinements": budget.refinements},
                               "max_mass_drift": float(np.max(np.abs(series.mass)))}
    if mc:
        mc_series = _run_mc(scenario, model)
        _write_csv(out/"mc.csv", ("t", "c_hat", "stderr", "ess", "pairing"),
                   zip(mc_series.times, mc_series.c_hat, mc_series.stderr, mc_series.ess,
                       np.interp(mc_series.times, series.times, series.pairing)))
        summary["mc"] = mc_series.to_dict()
    _write_json(out/"series.json", summary)
    return series

def _kinetic_beta(model: Model, scenario: Scenario) -> Optional[BetaFn]:
    try:
        spatial, averaging = model_constants(model, scenario.gamma, scenario.tau)
        return beta_kin(model, spatial, averaging, scenario.gamma)
    except ConfigurationError as e:
        _log.info("No kinetic weak dissipation function: %s", e)
        return None

def _fit(t: np.ndarray, F: np.ndarray, kind: Any, decades: float = 2.0) -> Optional[float]:
    try:
        return fit_exponent(t, F, kind, decades=decades)
    except ConfigurationError as e:
        _log.info("Exponent fit skipped: %s", e)
        return None

def cmd_verify(scenario: Scenario, out: Path, *, refine: int = 1, mc: bool = False) -> ReportRow:
    r"""
        Certifies and simulates a scenario, audits envelope domination, the weak dissipation inequality and,
        with ``mc``, the particle cross-check, then writes ``report.json`` and appends to ``report.csv``.
    """
    # pylint: disable = too-many-locals
    model = scenario.build_model()
    exponent = model_exponent(model)
    row = ReportRow(scenario.scenario_id, scenario.name, exponent.symbol)
    if model.potential.strongly_confining and model.kinetic.poincare_like:
        row.reason = "exponential case: certified constants out of scope"
        _finish_report(out, row)
        return row
    clock = time.perf_counter()
    series, budget = _simulate(scenario, model, refine)
    row.runtimes["simulate"] = time.perf_counter()-clock
    clock = time.perf_counter()
    cert = _certificate(model, scenario, series.initial_oscillation)
    beta = _kinetic_beta(model, scenario)
    row.runtimes["certify"] = time.perf_counter()-clock
    if cert.exponent is not None and cert.exponent.kind != "exponential":
        t_cert = np.geomspace(1.0, 1e6, 200)
        row.certified_exponent = _fit(t_cert, cert.envelope(t_cert), cert.exponent.fit_kind)
        positive = series.times > 0.0
        # last decade of the run, past the initial transient
        row.simulated_exponent = _fit(series.times[positive], series.l2_sq[positive]/series.l2_sq[0],
                                      cert.exponent.fit_kind, decades=1.0)
    domination = domination_check(series, cert, budget.l2)
    row.domination = "pass" if domination.passed else "fail"
    if beta is not None:
        audit = weak_dissipation_check(series, beta, series.initial_oscillation, budget.H_tau)
        row.worst_margin = audit.worst_margin
        row.weak_dissipation = "pass" if audit.passed else "fail"
    else:
        row.reason = "no kinetic weak dissipation function for this regime"
    if mc:
        clock = time.perf_counter()
        mc_series = _run_mc(scenario, model)
        check = cross_validate(series, mc_series, budget.pairing)
        row.cross_validation = "pass" if check.passed else "fail"
        row.runtimes["mc"] = time.perf_counter()-clock
    _finish_report(out, row)
    return row

def _finish_report(out: Path, row: ReportRow) -> None:
    _write_json(out/"report.json", row.to_json())
    path = out/"report.csv"
    new = not path.exists()
    with open(path, "a", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        if new:
            w.writerow(REPORT_COLUMNS)
        w.writerow(row.csv_row())
    _log.log(logging.WARNING if row.verdict == "fail" else logging.INFO, "Verdict for %s: %s %s",
             row.name, row.verdict, row.reason)

_TABLE_POTENTIALS: Tuple[Tuple[str, Any, float], ...] = (("alpha>=1", "subexp", 2.0), ("alpha<1", "subexp", 0.5),
                                                          ("log p", "log", 2.0))
_TABLE_KINETICS: Tuple[Tuple[str, Any, Optional[float]], ...] = (("delta>=1", "gaussian", None),
                                                                 ("delta<1", "subexp", 0.5), ("log q", "log", 2.0))

def cmd_tabulate(out: Path) -> List[Tuple[str, ...]]:
    r"""
        Writes ``table1.csv``: the nine decay classes for representative parameters (:math:`\alpha=\delta=1/2` for the
        weak sub-exponential rows, :math:`p=q=2` for the logarithmic ones), with the overdamped class of each potential.
    """
    rows: List[Tuple[str, ...]] = []
    for pot_label, pot_kind, pot_param in _TABLE_POTENTIALS:
        over = overdamped_exponent(pot_kind, pot_param)
        for kin_label, kin_kind, kin_param in _TABLE_KINETICS:
            e = table1_exponent(pot_kind, pot_param, kin_kind, kin_param)
            rows.append((pot_label, kin_label, e.kind, "" if e.r is None else repr(e.r), e.symbol, over.symbol))
    _write_csv(out/"table1.csv", ("potential", "kinetic", "kind", "r", "symbol", "overdamped"), rows)
    return rows

def cmd_chain_demo(scenario: Scenario, out: Path) -> None:
    r"""
        Writes the chaining of the spatial and velocity weak Poincaré functions of the scenario (``chain.csv``),
        the conjugate of the resulting kinetic function (``kstar.csv``) and its inverse rate function (``rate.csv``).
    """
    model = scenario.build_model()
    spatial, averaging = model_constants(model, scenario.gamma, scenario.tau)
    beta_x = beta_tail_x(model, spatial.Z_W, averaging.C0_tau)
    beta_v = beta_velocity(model)
    chained = chain(beta_x, beta_v, scenario.gamma**2*averaging.C1_tau**2/averaging.C0_tau**2)
    s = np.geomspace(1e-2, 1e8, 200)
    _write_csv(out/"chain.csv", ("s", "beta_x", "beta_v", "beta_chained"), zip(s, beta_x(s), beta_v(s), chained(s)))
    kstar = legendre_kstar(beta_kin(model, spatial, averaging, scenario.gamma), scenario.a)
    _write_csv(out/"kstar.csv", ("w", "kstar"), zip(kstar.w, kstar.values))
    rate = rate_function(kstar)
    t = np.geomspace(1e-2, 1e6, 200)
    _write_csv(out/"rate.csv", ("t", "F_inv"), zip(t, rate.inverse(t)))

def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hypocert", description="Certified decay rates for kinetic Langevin dynamics.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logging")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("certify", "compute constants and the certified envelope"),
                       ("simulate", "run the decay simulation"),
                       ("verify", "audit the certificate against the simulation"),
                       ("tabulate", "write the table of decay classes"),
                       ("chain-demo", "write chained weak Poincaré functions and rate functions")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        if name == "tabulate":
            continue
        p.add_argument("--scenario", type=Path, default=None, help="scenario JSON (default: built-in scenario)")
        p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
        p.add_argument("--tau", type=float, default=None, help="override the averaging window")
        if name in ("simulate", "verify"):
            p.add_argument("--refine", type=int, default=1, help="Richardson refinement levels (0 disables)")
            p.add_argument("--mc", action="store_true", help="enable the particle cross-check")
    return parser

def _load(args: argparse.Namespace) -> Scenario:
    scenario = Scenario() if args.scenario is None else parse_scenario(Path(args.scenario).read_bytes())
    if args.seed is not None:
        scenario = scenario.with_seed(args.seed)
    if args.tau is not None:
        scenario = scenario.with_tau(args.tau)
    return scenario

def main(argv: Optional[Sequence[str]] = None) -> int:
    r""" Entry point of the ``hypocert`` command. """
    args = _parser().parse_args(argv)
    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    try:
        if args.command == "tabulate":
            cmd_tabulate(out)
            return 0
        scenario = _load(args)
        if args.command == "certify":
            cmd_certify(scenario, out)
        elif args.command == "simulate":
            cmd_simulate(scenario, out, refine=args.refine, mc=args.mc)
        elif args.command == "verify":
            return 1 if cmd_verify(scenario, out, refine=args.refine, mc=args.mc).verdict == "fail" else 0
        else:
            cmd_chain_demo(scenario, out)
    except AssumptionError as e:
        _log.error("%s", e)
        return 1
    except HypocertError as e:
        _log.error("%s", e)
        return 2
    except OSError as e:
        _log.error("Error reading scenario: %s", e)
        return 2
    return 0

__all__ = ("SERIES_COLUMNS", "REPORT_COLUMNS", "Verdict", "ReportRow", "cmd_certify", "cmd_simulate", "cmd_verify",
           "cmd_tabulate", "cmd_chain_demo", "main")
