"""Ground truth and measurement synthesis for the radar and 3-TOA experiments."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .models import (
    BirthModel,
    ClutterModel,
    MotionModel,
    SensorModel,
    border_birth_model,
    ncv_matrices,
    radar_h,
    toa_h,
)
from .rfs import Label

__all__ = [
    "GroundTruth",
    "ScenarioConfig",
    "TrackSpec",
    "TruthTrack",
    "generate_measurements",
    "generate_truth",
    "ncv_matrices",
    "radar1",
    "radar_h",
    "toa3",
    "toa_h",
]

REGION = (0.0, 50000.0)
RADAR_POSITION = (25000.0, 25000.0)
TOA_POSITIONS = ((0.0, 0.0), (50000.0, 0.0), (25000.0, 50000.0))
RENDEZVOUS = (27000.0, 23000.0)


@dataclass(frozen=True)
class TrackSpec:
    """A truth trajectory: piecewise constant velocity through timed waypoints.

    ``waypoints`` is a sequence of (scan, x, y); the first entry fixes the
    birth scan and position.  The track is alive on scans
    ``[birth_scan, death_scan)`` and moves straight past its last waypoint.
    """

    waypoints: tuple
    death_scan: int

    @property
    def birth_scan(self) -> int:
        return int(self.waypoints[0][0])


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    sensors: tuple[SensorModel, ...]
    tracks: tuple[TrackSpec, ...]
    n_scans: int = 200
    T_s: float = 5.0
    sigma_w: float = 5.0
    survival_probability: float = 0.99
    birth: BirthModel = field(default_factory=border_birth_model)
    truth_noise: bool = False

    def motion(self) -> MotionModel:
        return MotionModel.ncv(self.T_s, self.sigma_w, self.survival_probability)


@dataclass(frozen=True)
class TruthTrack:
    label: Label
    birth_scan: int
    death_scan: int
    states: np.ndarray  # (death_scan - birth_scan, 4)

    def state_at(self, scan: int) -> np.ndarray | None:
        if self.birth_scan <= scan < self.death_scan:
            return self.states[scan - self.birth_scan]
        return None


@dataclass(frozen=True)
class GroundTruth:
    tracks: tuple[TruthTrack, ...]
    n_scans: int
    T_s: float

    def states_at(self, scan: int) -> list[tuple[Label, np.ndarray]]:
        out = []
        for t in self.tracks:
            x = t.state_at(scan)
            if x is not None:
                out.append((t.label, x))
        return out

    def cardinality(self) -> np.ndarray:
        return np.array([len(self.states_at(k)) for k in range(self.n_scans)])

    def to_jsonl(self) -> str:
        lines = []
        for k in range(self.n_scans):
            lines.append(
                json.dumps(
                    {
                        "scan": k,
                        "time": k * self.T_s,
                        "targets": [
                            {"label": list(l), "state": x.tolist()} for l, x in self.states_at(k)
                        ],
                    }
                )
            )
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str, T_s: float = 5.0) -> GroundTruth:
        rows = [json.loads(line) for line in text.splitlines() if line.strip()]
        per_label: dict = {}
        for row in rows:
            for t in row["targets"]:
                per_label.setdefault(Label(*t["label"]), []).append((row["scan"], t["state"]))
        tracks = []
        for l, seq in sorted(per_label.items()):
            scans = [s for s, _ in seq]
            tracks.append(TruthTrack(l, scans[0], scans[-1] + 1, np.array([x for _, x in seq])))
        return cls(tuple(tracks), len(rows), T_s)


def generate_truth(config: ScenarioConfig, seed: int = 0) -> GroundTruth:
    """Propagate every track spec with the NCV transition.

    Velocities are reset at each waypoint so the track hits the next waypoint
    exactly.  With ``truth_noise`` the process noise is added on top (the
    waypoints are then only targets), drawn from a generator keyed by seed.
    """
    F, Q = ncv_matrices(config.T_s, config.sigma_w)
    rng = np.random.default_rng([seed, 0x7275])
    tracks = []
    for i, spec in enumerate(config.tracks):
        wps = [(int(s), float(x), float(y)) for s, x, y in spec.waypoints]
        s0, x0, y0 = wps[0]
        x = np.array([x0, 0.0, y0, 0.0])
        states = []
        seg = 1
        for k in range(s0, spec.death_scan):
            while seg < len(wps) and wps[seg][0] <= k:
                seg += 1
            if seg < len(wps):
                # head for the next waypoint, arriving on its scan
                s1, x1, y1 = wps[seg]
                dt = (s1 - k) * config.T_s
                x[1] = (x1 - x[0]) / dt
                x[3] = (y1 - x[2]) / dt
            elif k == s0:
                raise ValueError("a track needs at least two waypoints")
            states.append(x.copy())
            x = F @ x
            if config.truth_noise:
                x = x + rng.multivariate_normal(np.zeros(4), Q)
        tracks.append(TruthTrack(Label(s0, i + 1), s0, spec.death_scan, np.array(states)))
    return GroundTruth(tuple(tracks), config.n_scans, config.T_s)


def generate_measurements(
    truth: GroundTruth,
    sensor: SensorModel,
    scan: int,
    seed: int,
    sensor_index: int = 0,
) -> np.ndarray:
    """Detections (Bernoulli P_D per live target) plus Poisson clutter, shuffled.

    The random stream is keyed by (seed, sensor_index, scan), so every scan and
    sensor is reproducible on its own.
    """
    if not 0 <= scan < truth.n_scans:
        raise ValueError("scan out of range")
    rng = np.random.default_rng([seed, sensor_index, scan])
    Z = []
    for _, x in truth.states_at(scan):
        if rng.random() < sensor.detection_probability:
            Z.append(sensor.observe(x, rng))
    clutter = sensor.clutter.sample(rng)
    Z.extend(clutter)
    Z = np.array(Z, dtype=float).reshape(-1, sensor.meas_dim)
    return Z[rng.permutation(len(Z))]


def measurement_stream_jsonl(truth: GroundTruth, sensors: Sequence[SensorModel], seed: int) -> str:
    lines = []
    for k in range(truth.n_scans):
        frame = {
            "scan": k,
            "sensors": [
                generate_measurements(truth, s, k, seed, i).tolist() for i, s in enumerate(sensors)
            ],
        }
        lines.append(json.dumps(frame))
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# the two experiment configurations


def _tracks() -> tuple[TrackSpec, ...]:
    """Five targets born at border birth sites; four meet at scan 100.

    Each rendezvous track continues on the straight line it arrived on, so
    the only manoeuvre is the shared meeting point itself.
    """
    rx, ry = RENDEZVOUS

    def through(site, born, died):
        x0, y0 = site
        frac = (died - born) / (100 - born)
        end = (x0 + frac * (rx - x0), y0 + frac * (ry - y0))
        return TrackSpec(((born, x0, y0), (100, rx, ry), (died, *end)), died)

    return (
        through((0.0, 40000.0), 0, 180),
        through((25000.0, 0.0), 10, 200),
        through((50000.0, 15000.0), 20, 190),
        through((40000.0, 50000.0), 30, 155),
        TrackSpec(((50, 0.0, 5000.0), (200, 40000.0, 45000.0)), 200),
    )


def radar1(clutter_rate: float = 15.0, P_D: float = 0.85, sigma_bearing_deg: float = 1.0,
           sigma_range: float = 100.0, **overrides) -> ScenarioConfig:
    clutter = ClutterModel(clutter_rate, [[-np.pi, np.pi], [0.0, 40000.0]])
    sensor = SensorModel.radar(RADAR_POSITION, np.deg2rad(sigma_bearing_deg), sigma_range, P_D, clutter)
    return ScenarioConfig("radar1", (sensor,), _tracks(), **overrides)


def toa3(clutter_rate: float = 15.0, P_D: float = 0.85, sigma_range: float = 100.0,
         **overrides) -> ScenarioConfig:
    clutter = ClutterModel(clutter_rate, [[0.0, 75000.0]])
    sensors = tuple(
        SensorModel.toa(p, sigma_range, P_D, clutter, name=f"toa{i + 1}") for i, p in enumerate(TOA_POSITIONS)
    )
    return ScenarioConfig("toa3", sensors, _tracks(), **overrides)


SCENARIOS = {"radar1": radar1, "toa3": toa3}
