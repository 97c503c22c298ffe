"""Experiment harness: configs, reports, one small end-to-end run."""

import json

import numpy as np
import pytest

from acwillmore import DomainError
from acwillmore.experiments import (EXPERIMENT_IDS, Assertion,
                                    ExperimentConfig, ExperimentResult,
                                    _jsonify, default_config, emit_report,
                                    run_experiment)


def test_default_configs_validate():
    assert EXPERIMENT_IDS == ("E1", "E2", "E3", "E4", "E5", "E6")
    for eid in EXPERIMENT_IDS:
        cfg = default_config(eid)
        assert cfg.experiment == eid
        cfg.validate()
    with pytest.raises(DomainError):
        default_config("E7")


def test_config_validation_errors():
    with pytest.raises(DomainError):
        ExperimentConfig(experiment="bogus").validate()
    with pytest.raises(DomainError):
        ExperimentConfig(experiment="E1", model="lumpy").validate()
    with pytest.raises(DomainError):
        ExperimentConfig(experiment="E1", lams=(1.5,)).validate()
    with pytest.raises(DomainError):
        ExperimentConfig(experiment="E1", delta=0.7).validate()
    with pytest.raises(DomainError):
        ExperimentConfig(experiment="E1", n_polar=1).validate()


def test_jsonify():
    doc = _jsonify({"a": np.arange(3), "b": np.float64(0.5),
                    "c": np.int64(7), "d": np.bool_(True),
                    "e": (1, [2.0, np.float32(0.25)]), 3: "x"})
    assert doc == {"a": [0, 1, 2], "b": 0.5, "c": 7, "d": True,
                   "e": [1, [2.0, 0.25]], "3": "x"}
    assert json.dumps(doc)


def test_emit_report_round_trip(tmp_path):
    cfg = ExperimentConfig(experiment="E1", model="schwarzschild",
                           lams=(100.0,), out_dir=str(tmp_path))
    result = ExperimentResult(
        config=cfg,
        records=[{"lam": 100.0, "mass": 2.0}],
        assertions=[Assertion(name="demo", passed=True, tolerance=1e-3,
                              measured=2.0, target=2.0)],
        trace_rows=[{"lam": 100.0, "xi_1": 0.0, "xi_2": 0.0, "xi_3": 0.1,
                     "bary_1": 0.0, "bary_2": 0.0, "bary_3": 10.0,
                     "G": -1.5, "m_H": 2.1}],
        scan_rows=[],
        wall_clock=0.125)
    path = emit_report(result, tmp_path)
    doc = json.loads(path.read_text())
    assert doc["experiment"] == "E1"
    assert doc["passed"] is True
    assert doc["assertions"][0]["name"] == "demo"
    assert doc["config"]["lams"] == [100.0]
    assert "out_dir" not in doc["config"]
    # the volatile fields sit on their own lines for byte-level diffing
    lines = path.read_text().splitlines()
    assert sum('"timestamp":' in ln for ln in lines) == 1
    assert sum('"wall_clock_s":' in ln for ln in lines) == 1
    trace = (tmp_path / "traces.csv").read_text().splitlines()
    assert trace[0].startswith("lam,xi_1")
    assert trace[1].split(",")[8] == "2.1"
    assert (tmp_path / "scan.csv").read_text().splitlines()[0].startswith(
        "label,")


def test_e1_small_run():
    cfg = ExperimentConfig(experiment="E1", model="schwarzschild",
                           lams=(100.0,))
    result = run_experiment(cfg)
    assert result.passed
    names = [a.name for a in result.assertions]
    assert "adm-mass[lam=100]" in names
    assert len(result.trace_rows) == 1
    assert result.trace_rows[0]["m_H"] == pytest.approx(2.0, abs=1e-6)
    assert result.records[0]["mass"] == pytest.approx(2.0, abs=1e-3)
