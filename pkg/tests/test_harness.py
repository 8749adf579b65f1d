import csv
import json

import numpy as np
import pytest

from mdglmb import cli
from mdglmb.harness import (
    PER_SCAN_COLUMNS,
    ConfigError,
    ExperimentConfig,
    config_from_dict,
    run_experiment,
    run_trial,
    trial_seed,
    write_outputs,
)
from mdglmb.scenario import generate_truth


def small(**kw):
    base = {"scenario": "radar1", "filter": "lmb", "trials": 2, "seed": 5, "n_scans": 12}
    base.update(kw)
    return config_from_dict(base)


def test_config_errors_name_the_field():
    with pytest.raises(ConfigError) as e:
        config_from_dict({"trials": 0})
    assert e.value.path == "trials"
    with pytest.raises(ConfigError) as e:
        config_from_dict({"ospa": {"cutoff": -1}})
    assert e.value.path == "ospa"
    with pytest.raises(ConfigError) as e:
        config_from_dict({"truncation": {"max_hyp": 3}})
    assert e.value.path == "truncation.max_hyp"
    with pytest.raises(ConfigError) as e:
        config_from_dict({"scenario": "sonar"})
    assert e.value.path == "scenario"
    with pytest.raises(ConfigError) as e:
        config_from_dict({"scenario_params": {"bogus": 1}})
    assert e.value.path == "scenario_params"


def test_default_hypothesis_caps():
    assert small(filter="dglmb").truncation_config().max_hypotheses == 1000
    assert small(filter="mdglmb").truncation_config().max_hypotheses == 300


def test_trial_seeds_are_counter_based():
    assert trial_seed(1, 3) == trial_seed(1, 3)
    assert len({trial_seed(1, t) for t in range(50)}) == 50
    assert trial_seed(1, 3) != trial_seed(2, 3)


def test_outputs_and_header(tmp_path):
    cfg = small(keep_trials=True)
    res = run_experiment(cfg)
    write_outputs(res, tmp_path)
    with open(tmp_path / "per_scan.csv") as f:
        rows = list(csv.reader(f))
    assert tuple(rows[0]) == PER_SCAN_COLUMNS
    assert len(rows) == 1 + cfg.n_scans
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["config"]["filter"] == "lmb"
    assert summary["failed_trials"] == []
    assert (tmp_path / "trial_1.csv").exists()
    assert len((tmp_path / "truth.jsonl").read_text().splitlines()) == cfg.n_scans


def test_repeated_runs_byte_identical(tmp_path):
    cfg = small(trials=1)
    for name in ("a", "b"):
        write_outputs(run_experiment(cfg), tmp_path / name)
    assert (tmp_path / "a" / "per_scan.csv").read_bytes() == (tmp_path / "b" / "per_scan.csv").read_bytes()


def test_trial_order_does_not_matter():
    cfg = small(trials=3)
    truth = generate_truth(cfg.scenario_config(), cfg.seed)
    fwd = [run_trial(cfg, truth, t) for t in range(3)]
    rev = [run_trial(cfg, truth, t) for t in reversed(range(3))]
    for a, b in zip(fwd, reversed(rev)):
        assert np.array_equal(a.ospa, b.ospa)
        assert np.array_equal(a.est_n, b.est_n)


def test_failed_trial_is_recorded(monkeypatch):
    from mdglmb import harness
    from mdglmb.rfs import DegenerateDensityError

    real = harness.generate_measurements

    def flaky(truth, sensor, scan, seed, i=0):
        if seed == harness.trial_seed(5, 1) and scan == 3:
            raise DegenerateDensityError("injected")
        return real(truth, sensor, scan, seed, i)

    monkeypatch.setattr(harness, "generate_measurements", flaky)
    res = run_experiment(small())
    assert [t.trial for t in res.failed] == [1]
    assert len(res.succeeded) == 1
    assert "injected" in res.summary()["failed_trials"][0]["error"]


def test_near_ideal_observations_track_truth():
    """No clutter, certain detection, tiny noise: exact cardinality after a short lag."""
    params = {"clutter_rate": 0.0, "P_D": 1.0, "sigma_bearing_deg": 0.01, "sigma_range": 1.0}
    cfg = small(filter="mdglmb", trials=1, n_scans=60, scenario_params=params)
    res = run_experiment(cfg)
    t = res.succeeded[0]
    births = {0, 10, 20, 30, 50}
    for k in range(60):
        if any(b <= k < b + 3 for b in births):
            continue
        assert t.est_n[k] == t.true_n[k], k


def test_cli_success_and_failures(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"scenario": "radar1", "filter": "lmb", "trials": 1, "n_scans": 4}))
    out = tmp_path / "out"
    assert cli.main(["run", "--config", str(cfg), "--out", str(out), "--seed", "3"]) == 0
    assert (out / "per_scan.csv").exists()
    assert json.loads((out / "summary.json").read_text())["config"]["seed"] == 3

    assert cli.main(["run", "--config", str(cfg), "--trials", "0"]) != 0
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "config" and err["field"] == "trials"

    blocker = tmp_path / "file"
    blocker.write_text("")
    assert cli.main(["run", "--config", str(cfg), "--out", str(blocker / "sub")]) != 0
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "io"
    assert not (blocker / "sub").exists()
