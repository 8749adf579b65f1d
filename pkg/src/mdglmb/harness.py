"""Monte-Carlo experiment runner.

One experiment runs one filter on one scenario for a number of trials.  The
ground truth is generated once and shared; each trial draws its own clutter
and measurement noise from a seed split off the master seed by trial index,
so trials can run in any order (or in parallel) and still give the same
files.
"""

from __future__ import annotations

import csv
import io
import json
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .filters import FILTERS, TruncationConfig
from .gaussian import MixtureReduction, NumericalError
from .metrics import OspaConfig, ospa, positions
from .rfs import DegenerateDensityError
from .scenario import SCENARIOS, GroundTruth, ScenarioConfig, generate_measurements, generate_truth

PER_SCAN_COLUMNS = (
    "scan",
    "true_n",
    "est_n_mean",
    "est_n_std",
    "ospa_mean",
    "ospa_loc_mean",
    "ospa_card_mean",
    "hyp_count_mean",
)
TRIAL_COLUMNS = ("scan", "true_n", "est_n", "ospa", "ospa_loc", "ospa_card", "hyp_count", "predicted_count")

# failures that mark a single trial as failed instead of aborting the run
TRIAL_ERRORS = (DegenerateDensityError, NumericalError, np.linalg.LinAlgError, FloatingPointError)


class ConfigError(ValueError):
    """Invalid experiment configuration; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


@dataclass(frozen=True)
class TruncationParams:
    max_hypotheses: int | None = None  # None: 1000 for dglmb, 300 otherwise
    hypothesis_weight_floor: float = 1e-6
    k_best_per_hypothesis: int | None = None
    gate_probability: float | None = 0.999
    existence_floor: float = 1e-3


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str = "radar1"
    filter: str = "mdglmb"
    trials: int = 20
    seed: int = 0
    n_scans: int = 200
    scenario_params: dict = field(default_factory=dict)
    truncation: TruncationParams = field(default_factory=TruncationParams)
    mixture: MixtureReduction = field(default_factory=MixtureReduction)
    ospa: OspaConfig = field(default_factory=OspaConfig)
    out: str = "results"
    workers: int = 1
    keep_trials: bool = False

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError("scenario", f"unknown scenario {self.scenario!r}; expected one of {sorted(SCENARIOS)}")
        if self.filter not in FILTERS:
            raise ConfigError("filter", f"unknown filter {self.filter!r}; expected one of {sorted(FILTERS)}")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError("trials", "must be an integer >= 1")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError("seed", "must be an integer in [0, 2**64)")
        if not isinstance(self.n_scans, int) or self.n_scans < 1:
            raise ConfigError("n_scans", "must be an integer >= 1")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigError("workers", "must be an integer >= 1")

    def scenario_config(self) -> ScenarioConfig:
        try:
            return SCENARIOS[self.scenario](n_scans=self.n_scans, **self.scenario_params)
        except (TypeError, ValueError) as e:
            raise ConfigError("scenario_params", str(e)) from None

    def truncation_config(self) -> TruncationConfig:
        t = self.truncation
        max_h = t.max_hypotheses
        if max_h is None:
            max_h = 1000 if self.filter == "dglmb" else 300
        try:
            return TruncationConfig(
                max_hypotheses=max_h,
                hypothesis_weight_floor=t.hypothesis_weight_floor,
                k_best_per_hypothesis=t.k_best_per_hypothesis,
                gate_probability=t.gate_probability,
                existence_floor=t.existence_floor,
                mixture=self.mixture,
            )
        except ValueError as e:
            raise ConfigError("truncation", str(e)) from None

    def to_dict(self) -> dict:
        return asdict(self)


def _build(cls, data, path: str):
    if not isinstance(data, dict):
        raise ConfigError(path or "<root>", f"expected an object, got {type(data).__name__}")
    known = {f.name: f for f in fields(cls)}
    kwargs = {}
    for key, value in data.items():
        sub = f"{path}.{key}" if path else key
        if key not in known:
            raise ConfigError(sub, "unknown field")
        nested = _NESTED.get((cls, key))
        kwargs[key] = _build(nested, value, sub) if nested else value
    try:
        return cls(**kwargs)
    except ConfigError as e:
        raise ConfigError(f"{path}.{e.path}" if path else e.path, e.message) from None
    except (TypeError, ValueError) as e:
        raise ConfigError(path or "<root>", str(e)) from None


_NESTED = {
    (ExperimentConfig, "truncation"): TruncationParams,
    (ExperimentConfig, "mixture"): MixtureReduction,
    (ExperimentConfig, "ospa"): OspaConfig,
}


def config_from_dict(data: dict) -> ExperimentConfig:
    cfg = _build(ExperimentConfig, data, "")
    cfg.scenario_config()  # resolve now so bad parameters fail before any work
    cfg.truncation_config()
    return cfg


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError("config", f"cannot read {path}: {e.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError("config", f"invalid JSON at line {e.lineno}: {e.msg}") from None
    return config_from_dict(data)


# --------------------------------------------------------------------------
# trials


def trial_seed(seed: int, trial: int) -> int:
    """Counter-based split of the master seed; independent of execution order."""
    a, b = np.random.SeedSequence([seed, trial]).generate_state(2, dtype=np.uint32)
    return (int(a) << 32) | int(b)


@dataclass
class TrialResult:
    trial: int
    true_n: np.ndarray
    est_n: np.ndarray
    ospa: np.ndarray  # (n_scans, 3): total, localization, cardinality
    hyp_count: np.ndarray
    predicted_count: np.ndarray
    wall_ms: np.ndarray
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None

    def rows(self):
        for k in range(len(self.true_n)):
            yield (
                k,
                int(self.true_n[k]),
                int(self.est_n[k]),
                *(float(v) for v in self.ospa[k]),
                int(self.hyp_count[k]),
                int(self.predicted_count[k]),
            )


def run_trial(config: ExperimentConfig, truth: GroundTruth, trial: int) -> TrialResult:
    scen = config.scenario_config()
    filt = FILTERS[config.filter](scen.motion(), scen.birth, config.truncation_config())
    seed = trial_seed(config.seed, trial)
    n = config.n_scans
    true_n = truth.cardinality()
    est_n = np.zeros(n, dtype=int)
    dist = np.zeros((n, 3))
    hyp = np.zeros(n, dtype=int)
    npred = np.zeros(n, dtype=int)
    wall = np.zeros(n)
    try:
        with np.errstate(divide="ignore", over="ignore", under="ignore"):
            for k in range(n):
                frames = [(s, generate_measurements(truth, s, k, seed, i)) for i, s in enumerate(scen.sensors)]
                t0 = time.perf_counter()
                stats = filt.step(k, frames)
                est = filt.estimates()
                wall[k] = 1e3 * (time.perf_counter() - t0)
                truth_pos = positions([x for _, x in truth.states_at(k)])
                dist[k] = ospa(positions([x for _, x in est]), truth_pos, config.ospa)
                est_n[k] = len(est)
                # the LMB filter reports the GLMB components of its last update
                hyp[k] = stats.n_updated[-1] if config.filter == "lmb" and stats.n_updated else stats.n_final
                npred[k] = stats.n_predicted
    except TRIAL_ERRORS as e:
        return TrialResult(trial, true_n, est_n, dist, hyp, npred, wall, error=f"{type(e).__name__}: {e}")
    return TrialResult(trial, true_n, est_n, dist, hyp, npred, wall)


def _run_trial_packed(args):
    return run_trial(*args)


# --------------------------------------------------------------------------
# experiment


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    truth: GroundTruth
    trials: list  # TrialResult, ordered by trial index
    runtime_s: float

    @property
    def succeeded(self) -> list[TrialResult]:
        return [t for t in self.trials if not t.failed]

    @property
    def failed(self) -> list[TrialResult]:
        return [t for t in self.trials if t.failed]

    def per_scan(self) -> np.ndarray:
        """Rows of PER_SCAN_COLUMNS, reduced over trials in index order."""
        ok = self.succeeded
        if not ok:
            raise RuntimeError("every trial failed")
        est = np.stack([t.est_n for t in ok]).astype(float)
        dist = np.stack([t.ospa for t in ok])
        hyp = np.stack([t.hyp_count for t in ok]).astype(float)
        true_n = ok[0].true_n
        n = len(true_n)
        return np.column_stack(
            [
                np.arange(n),
                true_n,
                est.mean(axis=0),
                est.std(axis=0),
                dist[:, :, 0].mean(axis=0),
                dist[:, :, 1].mean(axis=0),
                dist[:, :, 2].mean(axis=0),
                hyp.mean(axis=0),
            ]
        )

    def bound_violations(self) -> int:
        """Scans where the full step ended with more hypotheses than prediction made."""
        if self.config.filter == "lmb":
            return 0
        return int(sum(np.sum(t.hyp_count > t.predicted_count) for t in self.succeeded))

    def summary(self) -> dict:
        table = self.per_scan()
        lo, hi = 40, min(160, len(table) - 1)
        window = slice(lo, hi + 1) if hi >= lo else slice(None)
        wall = [float(t.wall_ms.sum()) for t in self.succeeded]
        return {
            "config": self.config.to_dict(),
            "filter": self.config.filter,
            "aggregates": {
                self.config.filter: {
                    "trials_ok": len(self.succeeded),
                    "mean_ospa": float(table[:, 4].mean()),
                    "mean_ospa_loc": float(table[:, 5].mean()),
                    "mean_ospa_card": float(table[:, 6].mean()),
                    "mean_est_n_40_160": float(table[window, 2].mean()),
                    "mean_true_n_40_160": float(table[window, 1].mean()),
                    "mean_hyp_count": float(table[:, 7].mean()),
                    "bound_violations": self.bound_violations(),
                    "trial_wall_ms": wall,
                }
            },
            "failed_trials": [{"trial": t.trial, "error": t.error} for t in self.failed],
            "runtime_s": self.runtime_s,
        }


def check_writable(out) -> Path:
    """Create ``out`` and prove it is writable; raises OSError otherwise."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    with tempfile.NamedTemporaryFile(dir=out, prefix=".probe-"):
        pass
    return out


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    t0 = time.perf_counter()
    truth = generate_truth(config.scenario_config(), config.seed)
    jobs = [(config, truth, t) for t in range(config.trials)]
    if config.workers > 1 and config.trials > 1:
        with ProcessPoolExecutor(max_workers=min(config.workers, config.trials)) as pool:
            results = list(pool.map(_run_trial_packed, jobs))
    else:
        results = [_run_trial_packed(j) for j in jobs]
    results.sort(key=lambda r: r.trial)
    return ExperimentResult(config, truth, results, time.perf_counter() - t0)


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    return str(int(v)) if v.is_integer() and abs(v) < 2**53 else repr(v)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def per_scan_csv(result: ExperimentResult) -> str:
    rows = []
    for r in result.per_scan():
        rows.append((int(r[0]), int(r[1]), *r[2:]))
    return _csv(PER_SCAN_COLUMNS, rows)


def write_outputs(result: ExperimentResult, out) -> list[Path]:
    """Write the CSV/JSON artifacts; wall-clock times go to summary.json only."""
    out = check_writable(out)
    files = {
        "per_scan.csv": per_scan_csv(result),
        "truth.jsonl": result.truth.to_jsonl(),
        "summary.json": json.dumps(result.summary(), indent=2, sort_keys=True) + "\n",
    }
    if result.config.keep_trials:
        for t in result.trials:
            files[f"trial_{t.trial}.csv"] = _csv(TRIAL_COLUMNS, t.rows())
    written = []
    for name, text in files.items():
        p = out / name
        p.write_text(text)
        written.append(p)
    return written


__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ExperimentResult",
    "PER_SCAN_COLUMNS",
    "TrialResult",
    "TruncationParams",
    "check_writable",
    "config_from_dict",
    "load_config",
    "run_experiment",
    "run_trial",
    "trial_seed",
    "write_outputs",
]
