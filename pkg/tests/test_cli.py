import json

import pytest

from latticehk.cli import main
from latticehk.scenarios import (DEMOS, ScenarioError, report_bytes,
                                 run_scenario, validate_scenario)


def test_validate_rejects_bad_configs():
    with pytest.raises(ScenarioError):
        validate_scenario({"schema": "nope", "spacetime": {}, "checks": []})
    with pytest.raises(ScenarioError):
        validate_scenario({"schema": "latticehk-scenario/1",
                           "spacetime": {"kind": "plane",
                                         "window": [0, 4]},
                           "checks": ["no.such.check"]})
    with pytest.raises(ScenarioError):
        validate_scenario({"schema": "latticehk-scenario/1",
                           "spacetime": {"kind": "plane",
                                         "window": [0, 4]},
                           "checks": ["algebra.hom-counts"],
                           "bogus_key": 1})


def test_run_scenario_report_shape():
    config = {
        "schema": "latticehk-scenario/1",
        "seed": 3,
        "spacetime": {"kind": "cylinder", "circumference": 6,
                      "window": [-14, 16]},
        "universe": {"compactness": "rc", "t_range": [0, 3],
                     "max_height": 3, "cap": 900},
        "checks": ["algebra.hom-counts", "algebra.two-valued-colimit"],
    }
    report = run_scenario(config)
    assert report["schema"] == "latticehk-report/1"
    assert report["summary"]["fail"] == 0
    for rec in report["records"]:
        assert set(rec) >= {"id", "paper_ref", "verdict", "digest"}
    assert "generated_at" in report


def test_determinism_modulo_timestamp():
    config = json.loads(json.dumps(DEMOS["localization-oracle"]))
    r1 = run_scenario(config)
    r2 = run_scenario(config)
    assert report_bytes(r1, drop_timestamp=True) == \
        report_bytes(r2, drop_timestamp=True)


def test_cli_run_and_exit_codes(tmp_path):
    scn = tmp_path / "s.json"
    scn.write_text(json.dumps({
        "schema": "latticehk-scenario/1",
        "seed": 1,
        "spacetime": {"kind": "cylinder", "circumference": 6,
                      "window": [-14, 16]},
        "checks": ["algebra.hom-counts"],
    }))
    out = tmp_path / "report.json"
    assert main(["--report", str(out), "run", str(scn)]) == 0
    doc = json.loads(out.read_text())
    assert doc["summary"]["pass"] >= 1
    # truncated file: configuration error
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["run", str(bad)]) == 2
    assert main(["run", str(tmp_path / "missing.json")]) == 2


def test_cli_demo_and_overrides(tmp_path):
    out = tmp_path / "demo.json"
    code = main(["--report", str(out), "--seed", "11",
                 "demo", "localization-oracle"])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["config"]["seed"] == 11


def test_cli_list_checks(capsys):
    assert main(["list-checks"]) == 0
    out = capsys.readouterr().out
    assert "descent.kg-counit" in out
    assert "claim=" in out


def test_records_carry_registry_claims_and_digests():
    from latticehk.checks import CLAIMS
    config = json.loads(json.dumps(DEMOS["kg-descent"]))
    report = run_scenario(config)
    for rec in report["records"]:
        assert rec["paper_ref"] in CLAIMS
        assert rec["digest"]


def test_jobs_flag_parallel_consistency():
    config = json.loads(json.dumps(DEMOS["counterexamples"]))
    seq = run_scenario(config, jobs=1)
    par = run_scenario(config, jobs=4)
    assert report_bytes(seq, drop_timestamp=True) == \
        report_bytes(par, drop_timestamp=True)
