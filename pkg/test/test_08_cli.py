"""
    Tests on the command line: output files, their columns, and exit codes.
"""

import csv
import json
from pathlib import Path
from typing import Any, Dict, List, Tuple

import pytest

from hypocert.cli import REPORT_COLUMNS, SERIES_COLUMNS, ReportRow, main
from hypocert.scenario import parse_scenario

small_scenario: Dict[str, Any] = {"name": "small", "solver": {"nx": 16, "nv": 16, "t_final": 1.0, "stride": 5}}

def _scenario_file(tmp_path: Path, doc: Dict[str, Any], name: str = "scenario.json") -> Path:
    path = tmp_path/name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path

def _read_csv(path: Path) -> List[List[str]]:
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.reader(f))

def test_tabulate(tmp_path: Path) -> None:
    """ The table of decay classes has nine rows. """
    assert main(["tabulate", "--out", str(tmp_path)]) == 0
    rows = _read_csv(tmp_path/"table1.csv")
    assert rows[0] == ["potential", "kinetic", "kind", "r", "symbol", "overdamped"]
    assert len(rows) == 10
    cells = {(r[0], r[1]): r for r in rows[1:]}
    assert cells[("alpha>=1", "delta>=1")][2] == "exponential"
    assert cells[("log p", "log q")][4] == "t^-0.333333"
    assert cells[("alpha<1", "log q")][2] == "algebraic-minus"

def test_certify(tmp_path: Path) -> None:
    """ certificate.json carries the schema version, identifier, constants and tabulated envelope. """
    path = _scenario_file(tmp_path, small_scenario)
    assert main(["certify", "--scenario", str(path), "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path/"certificate.json").read_text(encoding="utf-8"))
    assert doc["spec"] == 1
    assert doc["scenario_id"] == parse_scenario(path.read_bytes()).scenario_id
    assert doc["symbolic_exponent"]["symbol"] == "t^-1"
    assert doc["certificate"]["regime"] == "thm3-weakpi"
    for key in ("Z_W", "P_W", "C0", "C1", "C0_tau", "C1_tau"):
        assert key in doc["constants"], f"failed at {key}"
    env = doc["certificate"]["envelope"]
    assert all(a >= b for a, b in zip(env, env[1:]))

def test_certify_overrides(tmp_path: Path) -> None:
    """ --tau and --seed override the scenario, changing its identifier. """
    path = _scenario_file(tmp_path, small_scenario)
    assert main(["certify", "--scenario", str(path), "--out", str(tmp_path), "--tau", "2.0", "--seed", "9"]) == 0
    doc = json.loads((tmp_path/"certificate.json").read_text(encoding="utf-8"))
    assert doc["certificate"]["tau"] == 2.0
    assert doc["scenario_id"] == parse_scenario(path.read_bytes()).with_tau(2.0).with_seed(9).scenario_id

def test_configuration_errors_exit_2(tmp_path: Path) -> None:
    """ Invalid scenarios and missing files exit with code 2. """
    bad = _scenario_file(tmp_path, {"solver": {"nx": 2}}, "bad.json")
    assert main(["certify", "--scenario", str(bad), "--out", str(tmp_path)]) == 2
    assert main(["certify", "--scenario", str(tmp_path/"missing.json"), "--out", str(tmp_path)]) == 2
    no_cpl = _scenario_file(tmp_path, {"model": {"potential": {"kind": "subexp", "alpha": 1.5}}}, "strong.json")
    assert main(["certify", "--scenario", str(no_cpl), "--out", str(tmp_path)]) == 2

def test_certify_strongly_confining(tmp_path: Path) -> None:
    """ With C_PL, strongly confining potentials are certified without the weighted constants. """
    path = _scenario_file(tmp_path, {"model": {"potential": {"kind": "subexp", "alpha": 1.5}}, "C_PL": 1.0})
    assert main(["certify", "--scenario", str(path), "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path/"certificate.json").read_text(encoding="utf-8"))
    assert doc["certificate"]["regime"] == "appendixA"
    assert doc["symbolic_exponent"]["kind"] == "exponential"

def test_assumption_failure_exit_1(tmp_path: Path) -> None:
    """ Models failing their assumptions exit with code 1. """
    path = _scenario_file(tmp_path, {"model": {"weight": {"theta": 0.1}}})
    assert main(["certify", "--scenario", str(path), "--out", str(tmp_path)]) == 1
    assert not (tmp_path/"certificate.json").exists()

def test_simulate(tmp_path: Path) -> None:
    """ series.csv has the documented columns; series.json summarises the run. """
    path = _scenario_file(tmp_path, small_scenario)
    assert main(["simulate", "--scenario", str(path), "--out", str(tmp_path), "--refine", "0"]) == 0
    rows = _read_csv(tmp_path/"series.csv")
    assert tuple(rows[0]) == SERIES_COLUMNS
    assert len(rows) > 2
    assert float(rows[1][0]) == 0.0
    assert all(r[-1] == "1" for r in rows[1:])
    summary = json.loads((tmp_path/"series.json").read_text(encoding="utf-8"))
    assert summary["spec"] == 1 and summary["budget"]["refinements"] == 0
    assert summary["max_mass_drift"] < 1e-12
    assert not (tmp_path/"mc.csv").exists()

def test_simulate_reproducible(tmp_path: Path) -> None:
    """ Rerunning a scenario with the same seed writes identical series and particle CSV bytes. """
    doc = dict(small_scenario, mc={"particles": 300, "t_final": 0.2, "stride": 5})
    path = _scenario_file(tmp_path, doc)
    outputs: List[Tuple[bytes, bytes]] = []
    for run in ("a", "b", "c"):
        seed = "5" if run != "c" else "6"
        out = tmp_path/run
        out.mkdir()
        assert main(["simulate", "--scenario", str(path), "--out", str(out), "--refine", "0", "--mc",
                     "--seed", seed]) == 0
        outputs.append(((out/"series.csv").read_bytes(), (out/"mc.csv").read_bytes()))
    assert outputs[0] == outputs[1]
    assert outputs[0][0] == outputs[2][0], "the finite-volume series does not depend on the seed"
    assert outputs[0][1] != outputs[2][1]

def test_verify(tmp_path: Path) -> None:
    """ Audits pass on the small scenario; report.csv accumulates rows. """
    path = _scenario_file(tmp_path, small_scenario)
    for _ in range(2):
        assert main(["verify", "--scenario", str(path), "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path/"report.json").read_text(encoding="utf-8"))
    assert report["verdict"] == "pass"
    assert report["domination"] == "pass" and report["weak_dissipation"] == "pass"
    assert report["cross_validation"] == "skipped"
    rows = _read_csv(tmp_path/"report.csv")
    assert tuple(rows[0]) == REPORT_COLUMNS
    assert len(rows) == 3

@pytest.mark.slow
def test_verify_log_gaussian_exponent(tmp_path: Path) -> None:
    """ Log(p=2) with Gaussian velocities up to t = 100: simulated exponent at least 0.7, envelope dominates. """
    doc = {"name": "log2-gaussian", "model": {"potential": {"kind": "log", "p": 2.0}, "kinetic": {"kind": "gaussian"}},
           "solver": {"nx": 64, "nv": 64, "t_final": 100.0, "stride": 10}}
    path = _scenario_file(tmp_path, doc)
    assert main(["verify", "--scenario", str(path), "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path/"report.json").read_text(encoding="utf-8"))
    assert report["simulated_exponent"] is not None
    assert report["simulated_exponent"] >= 0.7, f"simulated exponent {report['simulated_exponent']}"
    assert report["domination"] == "pass"

def test_verify_exponential_skipped(tmp_path: Path) -> None:
    """ Strongly confining potentials with Gaussian velocities are reported as skipped. """
    path = _scenario_file(tmp_path, {"model": {"potential": {"kind": "subexp", "alpha": 1.5}}})
    assert main(["verify", "--scenario", str(path), "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path/"report.json").read_text(encoding="utf-8"))
    assert report["verdict"] == "skipped"
    assert "exponential" in report["reason"]

def test_chain_demo(tmp_path: Path) -> None:
    """ Chained weak Poincaré functions, their conjugate and the inverse rate function are written. """
    doc = dict(small_scenario, model={"kinetic": {"kind": "log", "q": 2.0}})
    path = _scenario_file(tmp_path, doc)
    assert main(["chain-demo", "--scenario", str(path), "--out", str(tmp_path)]) == 0
    chain_rows = _read_csv(tmp_path/"chain.csv")
    assert chain_rows[0] == ["s", "beta_x", "beta_v", "beta_chained"]
    assert len(chain_rows) == 201
    assert _read_csv(tmp_path/"kstar.csv")[0] == ["w", "kstar"]
    rate_rows = _read_csv(tmp_path/"rate.csv")
    values = [float(r[1]) for r in rate_rows[1:]]
    assert all(a >= b for a, b in zip(values, values[1:]))

def test_report_row_verdict() -> None:
    """ Any failing audit fails the row; all-skipped rows are skipped. """
    row = ReportRow("bafy", "demo", "t^-1")
    assert row.verdict == "skipped"
    row.domination = "pass"
    assert row.verdict == "pass"
    row.cross_validation = "fail"
    assert row.verdict == "fail"
    data = row.to_json()
    assert data["spec"] == 1 and data["verdict"] == "fail"
    assert len(row.csv_row()) == len(REPORT_COLUMNS)

def test_missing_command() -> None:
    """ A subcommand is required. """
    with pytest.raises(SystemExit):
        main([])
