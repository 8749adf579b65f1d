"""Gaussian-mixture numerics: Kalman prediction, unscented update, mixture reduction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


class NumericalError(ArithmeticError):
    """Raised when a covariance stays non-factorizable after one jitter retry."""


LOG_2PI = math.log(2.0 * math.pi)


def wrap_angle(a):
    """Wrap angles to (-pi, pi]."""
    w = np.mod(np.asarray(a, dtype=float) + np.pi, 2.0 * np.pi) - np.pi
    return np.where(w == -np.pi, np.pi, w)


def _jitter(P: np.ndarray) -> np.ndarray:
    d = P.shape[-1]
    scale = 1e-9 * np.trace(P, axis1=-2, axis2=-1) / d
    return P + scale[..., None, None] * np.eye(d)


def safe_cholesky(P: np.ndarray) -> np.ndarray:
    """Batched lower Cholesky factor with a single deterministic jitter retry."""
    try:
        return np.linalg.cholesky(P)
    except np.linalg.LinAlgError:
        pass
    try:
        return np.linalg.cholesky(_jitter(P))
    except np.linalg.LinAlgError as exc:
        raise NumericalError("covariance is not positive definite") from exc


@dataclass(frozen=True)
class Gaussian:
    mean: np.ndarray
    cov: np.ndarray

    def pdf(self, x) -> float:
        return float(np.exp(gaussian_logpdf(np.asarray(x, float), self.mean, self.cov)))


@dataclass(frozen=True, eq=False)
class GaussianMixture:
    """Weighted sum of Gaussians stored as stacked arrays.

    ``weights`` has shape (n,), ``means`` (n, d) and ``covs`` (n, d, d).
    Instances are treated as immutable; the filters share them by reference.
    """

    weights: np.ndarray
    means: np.ndarray
    covs: np.ndarray

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        m = np.asarray(self.means, dtype=float)
        if m.ndim == 1:
            m = m[None, :]
        P = np.asarray(self.covs, dtype=float)
        if P.ndim == 2:
            P = P[None, :, :]
        if not (len(w) == m.shape[0] == P.shape[0]):
            raise ValueError("weights, means and covs disagree on component count")
        if P.shape[1:] != (m.shape[1], m.shape[1]):
            raise ValueError("covariance shape does not match state dimension")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", m)
        object.__setattr__(self, "covs", P)

    @classmethod
    def single(cls, mean, cov) -> GaussianMixture:
        mean = np.asarray(mean, dtype=float)
        return cls(np.ones(1), mean[None, :], np.asarray(cov, dtype=float)[None])

    @classmethod
    def concat(cls, mixtures: Sequence[GaussianMixture], scales: Sequence[float]) -> GaussianMixture:
        """Mixture of mixtures, ``sum_i scales[i] * mixtures[i]`` (not renormalized)."""
        return cls(
            np.concatenate([s * g.weights for g, s in zip(mixtures, scales)]),
            np.concatenate([g.means for g in mixtures]),
            np.concatenate([g.covs for g in mixtures]),
        )

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    @property
    def total_weight(self) -> float:
        return float(np.sum(self.weights))

    def components(self) -> list[tuple[float, Gaussian]]:
        return [(float(w), Gaussian(m, P)) for w, m, P in zip(self.weights, self.means, self.covs)]

    def normalized(self) -> GaussianMixture:
        s = self.total_weight
        if s <= 0:
            raise ValueError("mixture has zero total weight")
        return GaussianMixture(self.weights / s, self.means, self.covs)

    def mean(self) -> np.ndarray:
        return self.weights @ self.means / self.total_weight

    def cov(self) -> np.ndarray:
        mu = self.mean()
        d = self.means - mu
        spread = np.einsum("n,ni,nj->ij", self.weights, d, d)
        return (np.einsum("n,nij->ij", self.weights, self.covs) + spread) / self.total_weight

    def pdf(self, x):
        """Density at one point (d,) or at a batch of points (P, d)."""
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return float(self.weights @ np.exp(gaussian_logpdf(x, self.means, self.covs)))
        return np.exp(gaussian_logpdf(x[:, None, :], self.means, self.covs)) @ self.weights

    def to_json(self) -> dict:
        return {
            "weights": self.weights.tolist(),
            "means": self.means.tolist(),
            "covs": self.covs.tolist(),
        }

    @classmethod
    def from_json(cls, doc: dict) -> GaussianMixture:
        return cls(np.array(doc["weights"]), np.array(doc["means"]), np.array(doc["covs"]))


def gaussian_logpdf(x: np.ndarray, means: np.ndarray, covs: np.ndarray) -> np.ndarray:
    """log N(x; mean, cov), broadcast over leading axes of ``means``/``covs``."""
    L = safe_cholesky(covs)
    diff = x - means
    sol = np.linalg.solve(L, diff[..., None])[..., 0]
    maha = np.sum(sol**2, axis=-1)
    logdet = 2.0 * np.sum(np.log(np.diagonal(L, axis1=-2, axis2=-1)), axis=-1)
    d = means.shape[-1]
    return -0.5 * (d * LOG_2PI + logdet + maha)


# --------------------------------------------------------------------------
# prediction


def kf_predict(gm: GaussianMixture, F: np.ndarray, Q: np.ndarray) -> GaussianMixture:
    means = gm.means @ F.T
    covs = F @ gm.covs @ F.T + Q
    covs = 0.5 * (covs + np.swapaxes(covs, -1, -2))
    return GaussianMixture(gm.weights.copy(), means, covs)


# --------------------------------------------------------------------------
# unscented transform


@dataclass(frozen=True)
class UnscentedConfig:
    alpha: float = 1.0
    beta: float = 2.0
    kappa: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")

    def weights(self, n: int) -> tuple[float, np.ndarray, np.ndarray]:
        lam = self.alpha**2 * (n + self.kappa) - n
        if n + lam <= 0:
            raise ValueError("unscented scaling n + lambda must be positive")
        wm = np.full(2 * n + 1, 0.5 / (n + lam))
        wc = wm.copy()
        wm[0] = lam / (n + lam)
        wc[0] = lam / (n + lam) + (1.0 - self.alpha**2 + self.beta)
        if not (np.all(np.isfinite(wm)) and np.all(np.isfinite(wc))):
            raise ValueError("non-finite sigma-point weights")
        return n + lam, wm, wc


def sigma_points(means: np.ndarray, covs: np.ndarray, cfg: UnscentedConfig):
    """Sigma points of shape (n_comp, 2d+1, d) with mean and covariance weights."""
    n = means.shape[-1]
    scale, wm, wc = cfg.weights(n)
    L = safe_cholesky(scale * covs)  # columns are the spread directions
    offsets = np.swapaxes(L, -1, -2)  # (N, d, d) rows = columns of L
    X = np.concatenate(
        [means[:, None, :], means[:, None, :] + offsets, means[:, None, :] - offsets], axis=1
    )
    return X, wm, wc


@dataclass(frozen=True, eq=False)
class MeasurementPrediction:
    """Unscented measurement moments for every component of a mixture.

    Precomputing these once per (mixture, sensor) lets the filter score a
    whole measurement set and build posteriors without repeating the
    sigma-point propagation.
    """

    prior: GaussianMixture
    zhat: np.ndarray  # (n, m)
    S: np.ndarray  # (n, m, m) including R
    gain: np.ndarray  # (n, d, m)
    post_covs: np.ndarray  # (n, d, d)
    angle_dims: tuple[int, ...] = ()
    _chol: np.ndarray = field(default=None, repr=False)

    def innovations(self, Z: np.ndarray) -> np.ndarray:
        """(n, M, m) innovations z_j - zhat_i with angular components wrapped."""
        nu = Z[None, :, :] - self.zhat[:, None, :]
        for a in self.angle_dims:
            nu[..., a] = wrap_angle(nu[..., a])
        return nu

    def component_loglik(self, Z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Per-component log N(z_j; zhat_i, S_i) and squared Mahalanobis distance, both (n, M)."""
        nu = self.innovations(Z)
        L = self._chol
        n, M, m = nu.shape
        sol = np.linalg.solve(L[:, None, :, :], nu[..., None])[..., 0] if M else nu
        maha = np.sum(sol**2, axis=-1)
        logdet = 2.0 * np.sum(np.log(np.diagonal(L, axis1=-2, axis2=-1)), axis=-1)
        return -0.5 * (m * LOG_2PI + logdet[:, None] + maha), maha

    def likelihoods(self, Z: np.ndarray) -> np.ndarray:
        """Mixture likelihood sum_i w_i N(z_j; zhat_i, S_i) for every measurement, shape (M,)."""
        ll, _ = self.component_loglik(Z)
        return self.prior.weights @ np.exp(ll)

    def posterior(self, z: np.ndarray) -> tuple[GaussianMixture, float]:
        """Kalman-updated mixture for one measurement and its total likelihood."""
        z = np.asarray(z, dtype=float)[None, :]
        ll, _ = self.component_loglik(z)
        comp_lik = np.exp(ll[:, 0])
        total = math.fsum(self.prior.weights * comp_lik)
        nu = self.innovations(z)[:, 0, :]
        means = self.prior.means + np.einsum("nij,nj->ni", self.gain, nu)
        w = self.prior.weights * comp_lik
        if total > 0:
            w = w / total
        else:
            # every component underflowed; fall back to the log-domain weights
            lw = np.log(self.prior.weights) + ll[:, 0]
            w = np.exp(lw - np.max(lw))
            w /= w.sum()
        return GaussianMixture(w, means, self.post_covs), total


def predict_measurement(
    gm: GaussianMixture,
    h: Callable[[np.ndarray], np.ndarray],
    R: np.ndarray,
    cfg: UnscentedConfig = UnscentedConfig(),
    angle_dims: Sequence[int] = (),
) -> MeasurementPrediction:
    """Unscented transform of every mixture component through ``h``.

    ``h`` must accept an array of states with shape (..., d) and return (..., m).
    """
    means, covs = gm.means, gm.covs
    X, wm, wc = sigma_points(means, covs, cfg)
    Zs = np.asarray(h(X), dtype=float)
    if Zs.ndim == 2:
        Zs = Zs[..., None]
    for a in angle_dims:
        # unwrap sigma-point angles around the central point before averaging
        Zs[..., a] = Zs[:, :1, a] + wrap_angle(Zs[..., a] - Zs[:, :1, a])
    zhat = np.einsum("k,nkm->nm", wm, Zs)
    dZ = Zs - zhat[:, None, :]
    dX = X - means[:, None, :]
    S = np.einsum("k,nki,nkj->nij", wc, dZ, dZ) + R
    S = 0.5 * (S + np.swapaxes(S, -1, -2))
    Pxz = np.einsum("k,nki,nkj->nij", wc, dX, dZ)
    for a in angle_dims:
        zhat[:, a] = wrap_angle(zhat[:, a])
    L = safe_cholesky(S)
    Sinv = np.linalg.inv(S)
    K = Pxz @ Sinv
    post = covs - K @ S @ np.swapaxes(K, -1, -2)
    post = 0.5 * (post + np.swapaxes(post, -1, -2))
    return MeasurementPrediction(gm, zhat, S, K, post, tuple(angle_dims), L)


def ukf_update(
    gm: GaussianMixture,
    h: Callable[[np.ndarray], np.ndarray],
    R: np.ndarray,
    z,
    cfg: UnscentedConfig = UnscentedConfig(),
    angle_dims: Sequence[int] = (),
) -> tuple[GaussianMixture, float]:
    """Unscented Kalman update of a mixture with one measurement.

    Returns the renormalized posterior mixture and the total likelihood
    ``sum_i w_i N(z; zhat_i, S_i)``.
    """
    pred = predict_measurement(gm, h, np.asarray(R, dtype=float), cfg, angle_dims)
    return pred.posterior(np.asarray(z, dtype=float))


# --------------------------------------------------------------------------
# mixture reduction


@dataclass(frozen=True)
class MixtureReduction:
    prune_threshold: float = 1e-5
    merge_threshold: float = 4.0
    max_components: int = 10

    def __call__(self, gm: GaussianMixture) -> GaussianMixture:
        return reduce_mixture(gm, self)


def _keep(gm: GaussianMixture, idx: np.ndarray) -> GaussianMixture:
    w = gm.weights[idx]
    return GaussianMixture(w / w.sum(), gm.means[idx], gm.covs[idx])


def gm_prune(gm: GaussianMixture, weight_threshold: float) -> GaussianMixture:
    w = gm.weights / gm.total_weight
    idx = np.flatnonzero(w >= weight_threshold)
    if len(idx) == len(w):
        return gm.normalized()
    if len(idx) == 0:
        idx = np.array([int(np.argmax(w))])
    return _keep(gm, idx)


def gm_cap(gm: GaussianMixture, max_components: int) -> GaussianMixture:
    if len(gm) <= max_components:
        return gm.normalized()
    order = np.argsort(-gm.weights, kind="stable")[:max_components]
    return _keep(gm, np.sort(order))


def gm_merge(gm: GaussianMixture, mahalanobis_threshold: float) -> GaussianMixture:
    """Greedy moment-matching merge around the heaviest remaining component.

    Components whose squared Mahalanobis distance (in the metric of the
    heaviest component) is at most the threshold are fused.
    """
    n = len(gm)
    if n == 1:
        return gm
    w, m, P = gm.weights, gm.means, gm.covs
    # all pairwise distances d2[j, i] in the metric of component j, at once
    L = safe_cholesky(P)
    diff = m[None, :, :] - m[:, None, :]  # (j, i, d)
    sol = np.linalg.solve(L, np.swapaxes(diff, 1, 2))  # (j, d, i)
    d2 = np.sum(sol**2, axis=1)
    remaining = np.ones(n, dtype=bool)
    order = np.argsort(-w, kind="stable")
    out_w, out_m, out_P = [], [], []
    for j in order:
        if not remaining[j]:
            continue
        close = np.flatnonzero(remaining & (d2[j] <= mahalanobis_threshold))
        remaining[close] = False
        if len(close) == 1:
            out_w.append(w[j])
            out_m.append(m[j])
            out_P.append(P[j])
            continue
        wc = w[close]
        W = wc.sum()
        mu = wc @ m[close] / W
        dm = m[close] - mu
        cov = (np.einsum("n,nij->ij", wc, P[close]) + np.einsum("n,ni,nj->ij", wc, dm, dm)) / W
        out_w.append(W)
        out_m.append(mu)
        out_P.append(0.5 * (cov + cov.T))
    if len(out_w) == n:
        return gm
    return GaussianMixture(np.array(out_w), np.array(out_m), np.array(out_P))


def reduce_mixture(gm: GaussianMixture, cfg: MixtureReduction) -> GaussianMixture:
    gm = gm_prune(gm, cfg.prune_threshold)
    if len(gm) > 1:
        gm = gm_merge(gm, cfg.merge_threshold)
    return gm_cap(gm, cfg.max_components)
