"""OSPA miss distance between finite point sets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .assignment import hungarian


@dataclass(frozen=True)
class OspaConfig:
    cutoff: float = 600.0
    order: float = 2.0

    def __post_init__(self):
        if not self.cutoff > 0:
            raise ValueError("cutoff must be positive")
        if not self.order >= 1:
            raise ValueError("order must be at least 1")


class Ospa(NamedTuple):
    total: float
    localization: float
    cardinality: float


def _as_points(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        return np.zeros((0, 2))
    return np.atleast_2d(X)


def positions(states) -> np.ndarray:
    """(px, py) from 4-dim (px, vx, py, vy) states."""
    S = np.asarray(states, dtype=float).reshape(-1, 4)
    return S[:, [0, 2]]


def ospa(X, Y, cfg: OspaConfig = OspaConfig()) -> Ospa:
    """OSPA distance with its localization / cardinality split.

    The components are reported so that ``total**p == loc**p + card**p``,
    where ``loc**p`` is the mean cut-off assignment cost and ``card**p`` the
    mean cardinality penalty ``c**p * |m - n| / max(m, n)``.
    """
    X, Y = _as_points(X), _as_points(Y)
    m, n = len(X), len(Y)
    if m == 0 and n == 0:
        return Ospa(0.0, 0.0, 0.0)
    c, p = cfg.cutoff, cfg.order
    # fixed argument order makes the result exactly symmetric
    if m > n or (m == n and sorted(map(tuple, X)) > sorted(map(tuple, Y))):
        X, Y, m, n = Y, X, n, m
    if m == 0:
        return Ospa(c, 0.0, c)
    D = np.linalg.norm(X[:, None, :] - Y[None, :, :], axis=-1)
    D = np.minimum(D, c) ** p
    _, cost = hungarian(D)
    loc_p = cost / n
    card_p = c**p * (n - m) / n
    return Ospa((loc_p + card_p) ** (1 / p), loc_p ** (1 / p), card_p ** (1 / p))
