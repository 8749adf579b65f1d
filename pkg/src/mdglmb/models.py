"""Motion, birth, sensor and clutter models shared by the filters and the scenario generator."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gaussian import GaussianMixture, wrap_angle
from .rfs import Label, LmbParams, LmbTrack


def ncv_matrices(T_s: float, sigma_w: float) -> tuple[np.ndarray, np.ndarray]:
    """Transition and process-noise matrices of the nearly-constant-velocity model.

    State ordering is (px, vx, py, vy).
    """
    if T_s <= 0:
        raise ValueError("sampling interval must be positive")
    F1 = np.array([[1.0, T_s], [0.0, 1.0]])
    Q1 = sigma_w**2 * np.array([[T_s**4 / 4, T_s**3 / 2], [T_s**3 / 2, T_s**2]])
    Z = np.zeros((2, 2))
    return np.block([[F1, Z], [Z, F1]]), np.block([[Q1, Z], [Z, Q1]])


@dataclass(frozen=True, eq=False)
class MotionModel:
    F: np.ndarray
    Q: np.ndarray
    survival_probability: float = 0.99

    def __post_init__(self):
        if not 0.0 <= self.survival_probability <= 1.0:
            raise ValueError("survival probability must lie in [0, 1]")

    @classmethod
    def ncv(cls, T_s: float = 5.0, sigma_w: float = 5.0, survival_probability: float = 0.99):
        F, Q = ncv_matrices(T_s, sigma_w)
        return cls(F, Q, survival_probability)


@dataclass(frozen=True)
class BirthComponent:
    label_index: int
    existence: float
    density: GaussianMixture

    def __post_init__(self):
        if not 0.0 <= self.existence <= 1.0:
            raise ValueError("birth existence must lie in [0, 1]")
        if self.label_index < 1:
            raise ValueError("birth label index must be positive")


@dataclass(frozen=True)
class BirthModel:
    """Labeled multi-Bernoulli birth, re-instantiated every scan with labels (k, i)."""

    components: tuple[BirthComponent, ...] = ()

    def at(self, scan: int) -> LmbParams:
        return LmbParams(
            tuple(LmbTrack(Label(scan, c.label_index), c.existence, c.density) for c in self.components)
        )

    def means(self) -> np.ndarray:
        return np.array([c.density.mean() for c in self.components])


BIRTH_MEANS = (
    (0.0, 0.0, 40000.0, 0.0),
    (0.0, 0.0, 25000.0, 0.0),
    (0.0, 0.0, 5000.0, 0.0),
    (5000.0, 0.0, 0.0, 0.0),
    (25000.0, 0.0, 0.0, 0.0),
    (36000.0, 0.0, 0.0, 0.0),
    (50000.0, 0.0, 15000.0, 0.0),
    (50000.0, 0.0, 40000.0, 0.0),
    (40000.0, 0.0, 50000.0, 0.0),
    (10000.0, 0.0, 50000.0, 0.0),
)
BIRTH_COV = np.diag([1e6, 1e4, 1e6, 1e4])


def border_birth_model(existence: float = 0.09, cov: np.ndarray = BIRTH_COV) -> BirthModel:
    """The ten-site birth process of the radar/TOA experiments."""
    return BirthModel(
        tuple(
            BirthComponent(i + 1, existence, GaussianMixture.single(np.array(m), cov))
            for i, m in enumerate(BIRTH_MEANS)
        )
    )


@dataclass(frozen=True, eq=False)
class ClutterModel:
    """Poisson clutter, uniform over an axis-aligned box in measurement space."""

    rate: float
    region: np.ndarray  # (m, 2) rows of [low, high]

    def __post_init__(self):
        object.__setattr__(self, "region", np.atleast_2d(np.asarray(self.region, dtype=float)))
        if self.rate < 0:
            raise ValueError("clutter rate must be nonnegative")

    @property
    def volume(self) -> float:
        return float(np.prod(self.region[:, 1] - self.region[:, 0]))

    def intensity(self, Z) -> np.ndarray:
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        inside = np.all((Z >= self.region[:, 0]) & (Z <= self.region[:, 1]), axis=1)
        return np.where(inside, self.rate / self.volume, 0.0)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        n = rng.poisson(self.rate)
        lo, hi = self.region[:, 0], self.region[:, 1]
        return lo + (hi - lo) * rng.random((n, len(lo)))


def radar_h(x, position) -> np.ndarray:
    """(bearing [rad], range [m]) of states ``x`` (..., 4) seen from ``position``."""
    x = np.asarray(x, dtype=float)
    dx = x[..., 0] - position[0]
    dy = x[..., 2] - position[1]
    rng = np.hypot(dx, dy)
    if np.any(rng == 0.0):
        raise ValueError("bearing undefined: target at the sensor position")
    return np.stack([np.arctan2(dy, dx), rng], axis=-1)


def toa_h(x, position) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.hypot(x[..., 0] - position[0], x[..., 2] - position[1])[..., None]


@dataclass(frozen=True, eq=False)
class SensorModel:
    """A detection sensor: radar (bearing, range), TOA (range) or linear (H x)."""

    kind: str
    noise_std: tuple
    detection_probability: float
    clutter: ClutterModel
    position: tuple = (0.0, 0.0)
    H: np.ndarray | None = None
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("radar", "toa", "linear"):
            raise ValueError(f"unknown sensor kind {self.kind!r}")
        if not 0.0 <= self.detection_probability <= 1.0:
            raise ValueError("detection probability must lie in [0, 1]")
        if self.kind == "linear" and self.H is None:
            raise ValueError("linear sensor needs H")
        object.__setattr__(self, "noise_std", tuple(float(s) for s in np.atleast_1d(self.noise_std)))

    @classmethod
    def radar(cls, position, sigma_bearing, sigma_range, P_D, clutter, name="radar"):
        return cls("radar", (sigma_bearing, sigma_range), P_D, clutter, tuple(position), name=name)

    @classmethod
    def toa(cls, position, sigma_range, P_D, clutter, name="toa"):
        return cls("toa", (sigma_range,), P_D, clutter, tuple(position), name=name)

    @classmethod
    def linear(cls, H, noise_std, P_D, clutter, name="linear"):
        return cls("linear", tuple(np.atleast_1d(noise_std)), P_D, clutter, H=np.asarray(H, float), name=name)

    @property
    def meas_dim(self) -> int:
        return {"radar": 2, "toa": 1}.get(self.kind) or self.H.shape[0]

    @property
    def R(self) -> np.ndarray:
        return np.diag(np.square(self.noise_std))

    @property
    def angle_dims(self) -> tuple[int, ...]:
        return (0,) if self.kind == "radar" else ()

    def h(self, x) -> np.ndarray:
        if self.kind == "radar":
            return radar_h(x, self.position)
        if self.kind == "toa":
            return toa_h(x, self.position)
        return np.asarray(x, dtype=float) @ self.H.T

    def observe(self, x, rng: np.random.Generator) -> np.ndarray:
        z = self.h(x) + rng.normal(size=self.meas_dim) * np.array(self.noise_std)
        if self.kind == "radar":
            z[..., 0] = wrap_angle(z[..., 0])
        return z
