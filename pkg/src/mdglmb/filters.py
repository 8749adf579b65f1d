"""Filtering recursions for the delta-GLMB, marginalized delta-GLMB and LMB filters.

All three share one prediction kernel (ranked survival/birth subsets per
hypothesis) and one single-sensor update kernel (ranked association maps per
hypothesis).  They differ in what happens between sensors:

* delta-GLMB keeps every (label set, history) component,
* marginalized delta-GLMB collapses histories after each sensor update,
* LMB collapses all the way to one existence/density pair per label.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import logsumexp
from scipy.stats import chi2

from .assignment import assignment_cost, murty_iter
from .gaussian import (
    GaussianMixture,
    MixtureReduction,
    UnscentedConfig,
    kf_predict,
    gm_prune,
    predict_measurement,
    wrap_angle,
)
from .models import BirthModel, MotionModel, SensorModel
from .rfs import (
    DegenerateDensityError,
    DGlmbDensity,
    DGlmbHypothesis,
    Label,
    LmbParams,
    LmbTrack,
    MdGlmbDensity,
    cardinality_distribution,
    extract_lmb,
    glmb_from_lmb,
    iter_subsets,
    marginalize,
    normalize,
)

KAPPA_FLOOR = 1e-300

AssociationMap = dict  # Label -> measurement index, 0 = missed


def is_injective(assoc: AssociationMap) -> bool:
    used = [j for j in assoc.values() if j > 0]
    return len(used) == len(set(used))


@dataclass(frozen=True)
class TruncationConfig:
    """Hypothesis budgets, gating and mixture-reduction settings.

    ``k_best_per_hypothesis=None`` selects the weight-proportional budget
    ``max(1, round(max_hypotheses * w))``.  ``max_hypotheses=None`` together
    with ``k_best_per_hypothesis=None`` means no truncation at all.
    """

    max_hypotheses: int | None = 300
    hypothesis_weight_floor: float = 1e-6
    k_best_per_hypothesis: int | None = None
    gate_probability: float | None = 0.999
    existence_floor: float = 1e-3
    mixture: MixtureReduction | None = field(default_factory=MixtureReduction)
    ukf: UnscentedConfig = field(default_factory=UnscentedConfig)

    def __post_init__(self):
        if self.max_hypotheses is not None and self.max_hypotheses < 1:
            raise ValueError("max_hypotheses must be positive")
        if self.k_best_per_hypothesis is not None and self.k_best_per_hypothesis < 1:
            raise ValueError("k_best_per_hypothesis must be positive")
        if self.gate_probability is not None and not 0.0 < self.gate_probability < 1.0:
            raise ValueError("gate_probability must lie in (0, 1)")
        if self.hypothesis_weight_floor < 0:
            raise ValueError("weight floor must be nonnegative")

    @classmethod
    def exact(cls) -> TruncationConfig:
        """No gating, truncation or mixture reduction."""
        return cls(None, 0.0, None, None, 0.0, None)

    def budget(self, weight: float) -> int | None:
        if self.k_best_per_hypothesis is not None:
            return self.k_best_per_hypothesis
        if self.max_hypotheses is None:
            return None
        return max(1, round(self.max_hypotheses * weight))


# --------------------------------------------------------------------------
# truncation


def truncate_hypotheses(density, trunc: TruncationConfig):
    """Weight floor, then top ``max_hypotheses``, then renormalize.

    Label sets are ranked by total weight (ties by canonical label-set
    order).  Each set keeps its ``max(1, round(max_hypotheses * W))`` best
    histories until the cap is reached, and the kept histories are rescaled
    to carry the set's whole weight ``W``.  With one component per label
    set this is the plain top-N rule.  Keeping the label-set spread stops a
    delta-GLMB whose histories share one label set from crowding out every
    birth and death.  If every hypothesis falls below the floor the single
    best one is kept.
    """
    density = normalize(density)
    groups: dict = {}
    for h in density.hypotheses:
        groups.setdefault(h.labels, []).append(h)
    total = {labels: math.fsum(h.weight for h in hs) for labels, hs in groups.items()}
    cap = trunc.max_hypotheses
    kept: list = []
    for labels in sorted(groups, key=lambda l: (-total[l], l)):
        hs = sorted(groups[labels], key=lambda h: (-h.weight, getattr(h, "history_id", 0)))
        hs = [h for h in hs if h.weight >= trunc.hypothesis_weight_floor]
        if cap is not None:
            hs = hs[: min(max(1, round(cap * total[labels])), cap - len(kept))]
        kept.extend(_carry_set_weight(hs, total[labels]))
        if cap is not None and len(kept) >= cap:
            break
    if not kept:
        kept = [min(density.hypotheses, key=lambda h: (-h.weight, h.labels, getattr(h, "history_id", 0)))]
    return normalize(type(density)(tuple(kept)))


def _carry_set_weight(hs, total: float):
    """Rescale the kept histories of one label set to sum to ``total``."""
    kept = math.fsum(h.weight for h in hs)
    if not hs or kept == total or kept <= 0:
        return hs
    return [h.reweighted(h.weight * (total / kept)) for h in hs]


# --------------------------------------------------------------------------
# prediction


class _Predictor:
    """Caches the Kalman prediction of every density object seen in one step."""

    def __init__(self, motion: MotionModel):
        self.motion = motion
        self._cache: dict[int, tuple[GaussianMixture, GaussianMixture]] = {}

    def __call__(self, gm: GaussianMixture) -> GaussianMixture:
        hit = self._cache.get(id(gm))
        if hit is None:
            hit = (gm, kf_predict(gm, self.motion.F, self.motion.Q))
            self._cache[id(gm)] = hit
        return hit[1]


class _Ranked:
    """Memoized view of a lazy ranked sequence, shared by several readers."""

    def __init__(self, stream):
        self._stream = stream
        self._items: list = []

    def get(self, i: int):
        while len(self._items) <= i:
            nxt = next(self._stream, None)
            if nxt is None:
                return None
            self._items.append(nxt)
        return self._items[i]


def _ranked_variants(parents, birth: BirthModel, P_S: float, trunc, scan):
    """Yield (parent index, subset, subset probability, labels), best first.

    ``parents`` is a sequence of (labels, weight).  Every parent contributes
    a lazily ranked stream of survivor/birth subsets; the streams are merged
    on ``weight * probability`` so the first N items are exactly the N best
    of the full enumeration.  Enumeration stops after ``max_hypotheses``
    distinct label sets or once the joint weight drops below the
    hypothesis weight floor.
    """
    born_labels = tuple(b.label for b in birth.at(scan).tracks)
    born_r = [b.existence for b in birth.at(scan).tracks]
    # parents with equally many survivors share one ranked subset sequence
    ranked: dict[int, _Ranked] = {}
    heap = []
    for pi, (labels, weight) in enumerate(parents):
        if weight <= 0:
            continue
        n = len(labels)
        if n not in ranked:
            ranked[n] = _Ranked(iter_subsets([P_S] * n + born_r))
        idx, p = ranked[n].get(0)
        heap.append((-weight * p, pi, 0, idx, p))
    heapq.heapify(heap)
    limit = math.inf if trunc.max_hypotheses is None else trunc.max_hypotheses
    seen: set = set()
    while heap:
        negw, pi, rank, idx, p = heapq.heappop(heap)
        if seen and -negw < trunc.hypothesis_weight_floor:
            break
        labels, weight = parents[pi]
        cand = labels + born_labels
        out = tuple(cand[i] for i in idx)
        if out not in seen:
            if len(seen) >= limit:
                break
            seen.add(out)
        if p > 0:
            yield pi, idx, p, out
        nxt = ranked[len(labels)].get(rank + 1)
        if nxt is not None:
            heapq.heappush(heap, (-weight * nxt[1], pi, rank + 1, nxt[0], nxt[1]))


def _variant_densities(h, idx, born, kf):
    n_surv = len(h.labels)
    dens = {}
    for i in idx:
        if i < n_surv:
            l = h.labels[i]
            dens[l] = kf(h.densities[l])
        else:
            b = born[i - n_surv]
            dens[b.label] = b.density
    return dens


def predict(
    prior: MdGlmbDensity,
    motion: MotionModel,
    birth: BirthModel,
    trunc: TruncationConfig,
    scan: int = 0,
) -> MdGlmbDensity:
    """Marginalized delta-GLMB prediction to scan ``scan``.

    Components reaching the same label set from different prior hypotheses
    are merged by weight addition and density mixing.
    """
    hyps = prior.hypotheses
    born = birth.at(scan).tracks
    kf = _Predictor(motion)
    parents = [(h.labels, h.weight) for h in hyps]
    comps = DGlmbDensity(
        tuple(
            DGlmbHypothesis._raw(labels, pi, hyps[pi].weight * p, _variant_densities(hyps[pi], idx, born, kf))
            for pi, idx, p, labels in _ranked_variants(parents, birth, motion.survival_probability, trunc, scan)
        )
    )
    return truncate_hypotheses(marginalize(comps, trunc.mixture), trunc)


def predict_dglmb(
    prior: DGlmbDensity,
    motion: MotionModel,
    birth: BirthModel,
    trunc: TruncationConfig,
    scan: int = 0,
) -> DGlmbDensity:
    """Delta-GLMB prediction; every component keeps its own history.

    Variants are ranked per prior label set on the set's total weight, as
    in the marginalized filter.  Each selected variant is then applied to
    the ``max(1, round(max_hypotheses * w))`` best histories of that set,
    ``w`` being the variant's total weight, and those histories carry the
    whole of ``w``.
    """
    groups: dict = {}
    for h in prior.hypotheses:
        groups.setdefault(h.labels, []).append(h)
    for hs in groups.values():
        hs.sort(key=lambda h: (-h.weight, h.history_id))
    parents = [(labels, math.fsum(h.weight for h in hs)) for labels, hs in groups.items()]
    born = birth.at(scan).tracks
    kf = _Predictor(motion)
    comps = []
    for gi, idx, p, labels in _ranked_variants(parents, birth, motion.survival_probability, trunc, scan):
        members = groups[parents[gi][0]]
        if trunc.max_hypotheses is not None:
            members = members[: max(1, round(trunc.max_hypotheses * parents[gi][1] * p))]
        for h in _carry_set_weight(members, parents[gi][1]):
            comps.append(
                DGlmbHypothesis._raw(labels, len(comps), h.weight * p, _variant_densities(h, idx, born, kf))
            )
    return truncate_hypotheses(DGlmbDensity(tuple(comps)), trunc)


# --------------------------------------------------------------------------
# update


class _Scorer:
    """Batched unscented scoring of every distinct density against one measurement set."""

    def __init__(self, densities: list[GaussianMixture], sensor: SensorModel, Z: np.ndarray, trunc):
        self.sensor = sensor
        self.Z = Z
        self.trunc = trunc
        self.index = {id(g): i for i, g in enumerate(densities)}
        self.densities = densities
        n_comp = np.array([len(g) for g in densities], dtype=int)
        self.start = np.concatenate([[0], np.cumsum(n_comp)[:-1]]).astype(int)
        self.n_comp = n_comp
        M = len(Z)
        P_D = sensor.detection_probability
        self.miss_cost = math.inf if P_D >= 1.0 else -math.log1p(-P_D)
        n = len(densities)
        if M == 0 or P_D <= 0.0 or n == 0:
            self.cost = np.full((n, M), math.inf)
            self.pred = None
            self._best()
            return
        stacked = GaussianMixture(
            np.concatenate([g.weights for g in densities]),
            np.concatenate([g.means for g in densities]),
            np.concatenate([g.covs for g in densities]),
        )
        pred = predict_measurement(stacked, sensor.h, sensor.R, trunc.ukf, sensor.angle_dims)
        ll, maha = pred.component_loglik(Z)
        self.pred = pred
        self.ll = ll
        logw = np.log(np.maximum(stacked.weights, 1e-300))[:, None] + ll
        # log of the mixture likelihood per density, via a max-shifted segment sum
        seg_max = np.maximum.reduceat(logw, self.start, axis=0)
        rep = np.repeat(seg_max, n_comp, axis=0)
        with np.errstate(invalid="ignore"):
            shifted = np.exp(logw - rep)
        log_lik = seg_max + np.log(np.add.reduceat(shifted, self.start, axis=0))
        kappa = np.maximum(sensor.clutter.intensity(Z), KAPPA_FLOOR)
        cost = -(math.log(P_D) + log_lik - np.log(kappa)[None, :])
        if trunc.gate_probability is not None:
            gamma = chi2.ppf(trunc.gate_probability, sensor.meas_dim)
            gated = np.logical_or.reduceat(maha <= gamma, self.start, axis=0)
            cost = np.where(gated, cost, math.inf)
        self.cost = np.where(np.isnan(cost), math.inf, cost)
        self._post: dict[tuple[int, int], GaussianMixture] = {}
        self._best()

    def _best(self):
        """Cheapest single choice (measurement j+1, or 0 for a miss) per density."""
        n, M = self.cost.shape
        if M:
            j = np.argmin(self.cost, axis=1)
            c = self.cost[np.arange(n), j]
        else:
            j = np.zeros(n, dtype=int)
            c = np.full(n, math.inf)
        det = np.isfinite(c) & (c <= self.miss_cost)
        self.best_choice = np.where(det, j + 1, 0).tolist()
        self.best_cost = np.where(det, c, self.miss_cost).tolist()

    def best_map(self, rows: list[int]):
        """The optimal map when the per-label cheapest choices do not collide, else None."""
        choice = [self.best_choice[r] for r in rows]
        used = [c for c in choice if c]
        if len(used) != len(set(used)):
            return None
        total = 0.0
        for r in rows:
            total += self.best_cost[r]
        if not math.isfinite(total):
            return None
        return tuple(choice), total

    def posterior(self, gm: GaussianMixture, j: int) -> GaussianMixture:
        """Updated density of ``gm`` given measurement ``j`` (0-based)."""
        d = self.index[id(gm)]
        key = (d, j)
        hit = self._post.get(key)
        if hit is not None:
            return hit
        s, n = self.start[d], self.n_comp[d]
        sl = slice(s, s + n)
        pred = self.pred
        nu = self.Z[j] - pred.zhat[sl]
        for a in pred.angle_dims:
            nu[:, a] = wrap_angle(nu[:, a])
        means = gm.means + np.einsum("nij,nj->ni", pred.gain[sl], nu)
        lw = np.log(np.maximum(gm.weights, 1e-300)) + self.ll[sl, j]
        w = np.exp(lw - lw.max())
        w = w / w.sum()
        post = GaussianMixture(w, means, pred.post_covs[sl])
        if n > 1 and self.trunc.mixture is not None and w.min() < self.trunc.mixture.prune_threshold:
            # an update never adds components, so pruning is the only reduction needed
            post = gm_prune(post, self.trunc.mixture.prune_threshold)
        self._post[key] = post
        return post


class _MapStream:
    """Ranked association maps of one hypothesis, produced on demand.

    ``rows_cost[i]`` holds the detection costs of label i against every
    measurement.  Maps are (map, cost) with map[i] = measurement index + 1
    or 0 for a miss.  Rows without any finite detection cost are forced to
    miss and never enter the assignment problem.  ``head`` may supply the
    optimum when it is already known; Murty's search starts only when a
    second map is requested.
    """

    def __init__(self, rows_cost: np.ndarray, miss_cost: float, head=None):
        self._rows_cost = rows_cost
        self._miss = miss_cost
        self._head = head
        self._gen = None

    def _start(self):
        rows_cost, miss_cost = self._rows_cost, self._miss
        n = len(rows_cost)
        if n == 0:
            return iter([((), 0.0)]), None
        finite = np.isfinite(rows_cost)
        active = np.nonzero(finite.any(axis=1))[0].tolist()
        if len(active) < n and not math.isfinite(miss_cost):
            return iter(()), None
        if not active:
            return iter([((0,) * n, miss_cost * n)]), None
        forced = miss_cost * (n - len(active)) if len(active) < n else 0.0
        cols = np.nonzero(finite[active].any(axis=0))[0]
        nc = len(cols)
        C = np.full((len(active), nc + len(active)), math.inf)
        C[:, :nc] = rows_cost[active][:, cols]
        np.fill_diagonal(C[:, nc:], miss_cost)

        def convert(a, c):
            m = [0] * n
            for r, col in enumerate(a):
                if col < nc:
                    m[active[r]] = int(cols[col]) + 1
            return tuple(m), forced + c

        # row-wise minima on distinct columns are already the optimum
        best = np.argmin(C, axis=1).tolist()
        quick = None
        if len(set(best)) == len(best) and math.isfinite(C[range(len(best)), best].sum()):
            quick = convert(best, assignment_cost(C, best))
        return (convert(a, c) for a, c in murty_iter(C)), quick

    def head(self):
        if self._head is None:
            self._gen, quick = self._start()
            self._head = quick if quick is not None else next(self._gen, None)
        return self._head

    def rest(self):
        """Every map after ``head()``, in non-decreasing cost."""
        head = self.head()
        if head is None:
            return
        if self._gen is None:
            self._gen, _ = self._start()
        skip = head[0]
        for m in self._gen:
            if skip is not None and m[0] == skip:
                skip = None
                continue
            yield m

    def take(self, k: int | None):
        head = self.head()
        if head is None:
            return []
        out = [head]
        if k is None or k > 1:
            for m in self.rest():
                out.append(m)
                if k is not None and len(out) >= k:
                    break
        return out


def update_single_sensor(
    pred,
    sensor: SensorModel,
    Z,
    trunc: TruncationConfig,
) -> DGlmbDensity:
    """Delta-GLMB update of every hypothesis with one sensor's measurement set.

    Each hypothesis expands into its ranked association maps; the output
    carries fresh history ids and the map that produced each component.
    """
    Z = np.asarray(Z, dtype=float).reshape(-1, sensor.meas_dim)
    pred = normalize(pred)
    uniq: dict[int, GaussianMixture] = {}
    for h in pred.hypotheses:
        for g in h.densities.values():
            uniq.setdefault(id(g), g)
    scorer = _Scorer(list(uniq.values()), sensor, Z, trunc)

    out_labels, out_logw, out_dens, out_maps = [], [], [], []
    for h in pred.hypotheses:
        if h.weight <= 0:
            continue
        rows = [scorer.index[id(h.densities[l])] for l in h.labels]
        stream = _MapStream(scorer.cost[rows], scorer.miss_cost, scorer.best_map(rows))
        logw = math.log(h.weight)
        for amap, c in stream.take(trunc.budget(h.weight)):
            dens = {}
            for l, j in zip(h.labels, amap):
                g = h.densities[l]
                dens[l] = g if j == 0 else scorer.posterior(g, j - 1)
            out_labels.append(h.labels)
            out_logw.append(logw - c)
            out_dens.append(dens)
            out_maps.append(amap)
    if not out_labels:
        raise DegenerateDensityError("no feasible association for any hypothesis")
    logw = np.array(out_logw)
    w = np.exp(logw - logsumexp(logw))
    hyps = tuple(
        DGlmbHypothesis._raw(labels, i, float(wi), dens, amap)
        for i, (labels, wi, dens, amap) in enumerate(zip(out_labels, w, out_dens, out_maps))
    )
    return DGlmbDensity(hyps)


# --------------------------------------------------------------------------
# full steps


@dataclass
class StepStats:
    """Hypothesis counts recorded during one filter step."""

    n_predicted: int = 0
    n_updated: list = field(default_factory=list)
    n_final: int = 0


def mdglmb_step(
    prior: MdGlmbDensity,
    motion: MotionModel,
    birth: BirthModel,
    sensors: Sequence[tuple[SensorModel, np.ndarray]],
    trunc: TruncationConfig,
    scan: int = 0,
    stats: StepStats | None = None,
) -> MdGlmbDensity:
    """Predict once, then update-and-marginalize sensor by sensor."""
    dens = predict(prior, motion, birth, trunc, scan)
    if stats is not None:
        stats.n_predicted = len(dens)
    for sensor, Z in sensors:
        post = update_single_sensor(dens, sensor, Z, trunc)
        if stats is not None:
            stats.n_updated.append(len(post))
        dens = truncate_hypotheses(marginalize(post, trunc.mixture), trunc)
    if stats is not None:
        stats.n_final = len(dens)
    return dens


def dglmb_step(
    prior: DGlmbDensity,
    motion: MotionModel,
    birth: BirthModel,
    sensors: Sequence[tuple[SensorModel, np.ndarray]],
    trunc: TruncationConfig,
    scan: int = 0,
    stats: StepStats | None = None,
) -> DGlmbDensity:
    """Delta-GLMB step: association histories are kept, never marginalized."""
    dens = predict_dglmb(prior, motion, birth, trunc, scan)
    if stats is not None:
        stats.n_predicted = len(dens)
    for sensor, Z in sensors:
        dens = update_single_sensor(dens, sensor, Z, trunc)
        if stats is not None:
            stats.n_updated.append(len(dens))
        dens = truncate_hypotheses(dens, trunc)
    if stats is not None:
        stats.n_final = len(dens)
    return dens


def predict_lmb(lmb: LmbParams, motion: MotionModel, birth: BirthModel, scan: int) -> LmbParams:
    kf = _Predictor(motion)
    P_S = motion.survival_probability
    tracks = [LmbTrack(t.label, t.existence * P_S, kf(t.density)) for t in lmb.tracks]
    return LmbParams(tuple(tracks) + birth.at(scan).tracks)


def lmb_step(
    prior: LmbParams,
    motion: MotionModel,
    birth: BirthModel,
    sensors: Sequence[tuple[SensorModel, np.ndarray]],
    trunc: TruncationConfig,
    scan: int = 0,
    stats: StepStats | None = None,
) -> LmbParams:
    """LMB step: expand to a truncated GLMB for each sensor update, then collapse."""
    lmb = predict_lmb(prior, motion, birth, scan)
    if stats is not None:
        stats.n_predicted = len(lmb.tracks)
    for sensor, Z in sensors:
        glmb = glmb_from_lmb(lmb, trunc.max_hypotheses)
        post = update_single_sensor(glmb, sensor, Z, trunc)
        if stats is not None:
            stats.n_updated.append(len(post))
        lmb = extract_lmb(post, trunc.mixture)
    if trunc.existence_floor > 0:
        lmb = LmbParams(tuple(t for t in lmb.tracks if t.existence >= trunc.existence_floor))
    if stats is not None:
        stats.n_final = len(lmb.tracks)
    return lmb


# --------------------------------------------------------------------------
# estimation


def extract_estimates(density) -> list[tuple[Label, np.ndarray]]:
    """MAP cardinality (smallest n on ties), then the best hypothesis of that size."""
    n_star = cardinality_distribution(density).map()
    if n_star == 0:
        return []
    best = None
    for h in density.hypotheses:
        if len(h.labels) == n_star and (best is None or h.weight > best.weight):
            best = h
    return [(l, best.densities[l].mean()) for l in best.labels]


def lmb_estimates(lmb: LmbParams) -> list[tuple[Label, np.ndarray]]:
    """MAP cardinality of the multi-Bernoulli, then the most likely tracks."""
    rho = np.ones(1)
    for t in lmb.tracks:
        rho = np.convolve(rho, [1.0 - t.existence, t.existence])
    n_star = int(np.argmax(rho))
    top = sorted(lmb.tracks, key=lambda t: (-t.existence, t.label))[:n_star]
    return [(t.label, t.density.mean()) for t in sorted(top, key=lambda t: t.label)]


# --------------------------------------------------------------------------
# stateful wrappers used by the experiment harness


class MdGlmbFilter:
    name = "mdglmb"

    def __init__(self, motion, birth, trunc: TruncationConfig):
        self.motion, self.birth, self.trunc = motion, birth, trunc
        self.density = MdGlmbDensity.empty()

    def step(self, scan, sensors) -> StepStats:
        stats = StepStats()
        self.density = mdglmb_step(self.density, self.motion, self.birth, sensors, self.trunc, scan, stats)
        return stats

    def estimates(self):
        return extract_estimates(self.density)


class DGlmbFilter(MdGlmbFilter):
    name = "dglmb"

    def __init__(self, motion, birth, trunc: TruncationConfig):
        super().__init__(motion, birth, trunc)
        self.density = DGlmbDensity.empty()

    def step(self, scan, sensors) -> StepStats:
        stats = StepStats()
        self.density = dglmb_step(self.density, self.motion, self.birth, sensors, self.trunc, scan, stats)
        return stats


class LmbFilter(MdGlmbFilter):
    name = "lmb"

    def __init__(self, motion, birth, trunc: TruncationConfig):
        super().__init__(motion, birth, trunc)
        self.density = LmbParams(())

    def step(self, scan, sensors) -> StepStats:
        stats = StepStats()
        self.density = lmb_step(self.density, self.motion, self.birth, sensors, self.trunc, scan, stats)
        return stats

    def estimates(self):
        return lmb_estimates(self.density)


FILTERS = {"mdglmb": MdGlmbFilter, "dglmb": DGlmbFilter, "lmb": LmbFilter}
