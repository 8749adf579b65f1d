"""Labeled RFS densities (delta-GLMB, marginalized delta-GLMB, LMB) and their functionals."""

from __future__ import annotations

import heapq
import itertools
import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence, Union

import numpy as np

from .gaussian import GaussianMixture, MixtureReduction, reduce_mixture


class DegenerateDensityError(ValueError):
    """All hypothesis weights are zero."""


class Label(NamedTuple):
    birth_time: int
    index: int

    def __str__(self) -> str:
        return f"({self.birth_time},{self.index})"


def canonical(labels: Iterable[Label]) -> tuple[Label, ...]:
    labels = tuple(sorted(Label(*l) for l in labels))
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate labels in {labels}")
    return labels


def _check_densities(labels, densities):
    if set(densities) != set(labels):
        raise ValueError("densities must have exactly one entry per label")


@dataclass(frozen=True, eq=False)
class MdGlmbHypothesis:
    labels: tuple[Label, ...]
    weight: float
    densities: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "labels", canonical(self.labels))
        _check_densities(self.labels, self.densities)

    @classmethod
    def _raw(cls, labels, weight, densities):
        """Unchecked constructor for labels already in canonical order."""
        h = object.__new__(cls)
        h.__dict__.update(labels=labels, weight=weight, densities=densities)
        return h

    def reweighted(self, weight):
        return MdGlmbHypothesis._raw(self.labels, weight, self.densities)


@dataclass(frozen=True, eq=False)
class DGlmbHypothesis:
    labels: tuple[Label, ...]
    history_id: int
    weight: float
    densities: dict = field(default_factory=dict)
    association: tuple | None = None  # measurement index per label (0 = missed)

    def __post_init__(self):
        object.__setattr__(self, "labels", canonical(self.labels))
        _check_densities(self.labels, self.densities)

    @classmethod
    def _raw(cls, labels, history_id, weight, densities, association=None):
        """Unchecked constructor for labels already in canonical order."""
        h = object.__new__(cls)
        h.__dict__.update(
            labels=labels, history_id=history_id, weight=weight, densities=densities, association=association
        )
        return h

    def reweighted(self, weight):
        return DGlmbHypothesis._raw(self.labels, self.history_id, weight, self.densities, self.association)


@dataclass(frozen=True, eq=False)
class MdGlmbDensity:
    hypotheses: tuple[MdGlmbHypothesis, ...]

    def __post_init__(self):
        object.__setattr__(self, "hypotheses", tuple(self.hypotheses))
        keys = [h.labels for h in self.hypotheses]
        if len(set(keys)) != len(keys):
            raise ValueError("at most one hypothesis per label set")

    @classmethod
    def empty(cls) -> MdGlmbDensity:
        return cls((MdGlmbHypothesis((), 1.0, {}),))

    def __len__(self):
        return len(self.hypotheses)

    def by_labels(self) -> dict[tuple[Label, ...], MdGlmbHypothesis]:
        return {h.labels: h for h in self.hypotheses}

    def labels(self) -> list[Label]:
        return sorted({l for h in self.hypotheses for l in h.labels})


@dataclass(frozen=True, eq=False)
class DGlmbDensity:
    hypotheses: tuple[DGlmbHypothesis, ...]

    def __post_init__(self):
        object.__setattr__(self, "hypotheses", tuple(self.hypotheses))
        keys = [(h.labels, h.history_id) for h in self.hypotheses]
        if len(set(keys)) != len(keys):
            raise ValueError("(labels, history_id) pairs must be unique")

    @classmethod
    def empty(cls) -> DGlmbDensity:
        return cls((DGlmbHypothesis((), 0, 1.0, {}),))

    @classmethod
    def from_mdglmb(cls, density: MdGlmbDensity) -> DGlmbDensity:
        """View a marginalized density as a delta-GLMB with one history per label set."""
        return cls(
            tuple(
                DGlmbHypothesis(h.labels, i, h.weight, h.densities)
                for i, h in enumerate(density.hypotheses)
            )
        )

    def __len__(self):
        return len(self.hypotheses)

    def labels(self) -> list[Label]:
        return sorted({l for h in self.hypotheses for l in h.labels})


Density = Union[MdGlmbDensity, DGlmbDensity]


@dataclass(frozen=True)
class LmbTrack:
    label: Label
    existence: float
    density: GaussianMixture


@dataclass(frozen=True)
class LmbParams:
    tracks: tuple[LmbTrack, ...]

    def __post_init__(self):
        object.__setattr__(self, "tracks", tuple(sorted(self.tracks, key=lambda t: t.label)))
        for t in self.tracks:
            if not 0.0 <= t.existence <= 1.0:
                raise ValueError(f"existence of {t.label} outside [0, 1]")
        if len({t.label for t in self.tracks}) != len(self.tracks):
            raise ValueError("duplicate track labels")

    def existence(self) -> dict[Label, float]:
        return {t.label: t.existence for t in self.tracks}


@dataclass(frozen=True)
class CardinalityDistribution:
    probabilities: np.ndarray

    def mean(self) -> float:
        return float(np.arange(len(self.probabilities)) @ self.probabilities)

    def map(self) -> int:
        # argmax returns the first maximum, i.e. the smallest n on ties
        return int(np.argmax(self.probabilities))


# --------------------------------------------------------------------------
# functionals


def normalize(density: Density) -> Density:
    total = math.fsum(h.weight for h in density.hypotheses)
    if not total > 0:
        raise DegenerateDensityError("total hypothesis weight is zero")
    if total == 1.0:
        return density
    return type(density)(tuple(h.reweighted(h.weight / total) for h in density.hypotheses))


def cardinality_distribution(density: Density) -> CardinalityDistribution:
    n_max = max((len(h.labels) for h in density.hypotheses), default=0)
    rho = np.zeros(n_max + 1)
    for h in density.hypotheses:
        rho[len(h.labels)] += h.weight
    return CardinalityDistribution(rho)


def expected_cardinality(density: Density) -> float:
    return cardinality_distribution(density).mean()


def phd(density: Density, label: Label, x):
    """Labeled PHD: sum of ``w * p(x, label)`` over hypotheses containing ``label``.

    ``x`` may be a single state (d,) or a batch (P, d).
    """
    x = np.asarray(x, dtype=float)
    total = 0.0 if x.ndim == 1 else np.zeros(len(x))
    for h in density.hypotheses:
        if label in h.densities:
            total += h.weight * h.densities[label].pdf(x)
    return total


def _mix(contributions: dict, reduction: MixtureReduction | None) -> GaussianMixture:
    """Mixture sum_k s_k * g_k over {id: [g, s]} contributions, normalized."""
    items = list(contributions.values())
    if len(items) == 1:
        return items[0][0]
    total = sum(s for _, s in items)
    gm = GaussianMixture.concat([g for g, _ in items], [s / total for _, s in items])
    if reduction is not None:
        return reduce_mixture(gm, reduction)
    return gm.normalized()


def marginalize(density: DGlmbDensity, reduction: MixtureReduction | None = None) -> MdGlmbDensity:
    """Collapse association histories: one hypothesis per label set.

    The weight of label set I is the sum of its history weights and each
    label density is the weight-proportioned mixture of the per-history
    densities.  Mixture objects shared between histories are pooled before
    mixing, which is exact.
    """
    groups: dict[tuple, list] = {}
    for h in density.hypotheses:
        groups.setdefault(h.labels, []).append(h)
    out = []
    for labels, hs in groups.items():
        w = 0.0
        for h in hs:
            w += h.weight
        if w <= 0:
            continue
        if len(hs) == 1:
            out.append(MdGlmbHypothesis._raw(labels, w, hs[0].densities))
            continue
        dens = {}
        for l in labels:
            contrib: dict[int, list] = {}
            for h in hs:
                g = h.densities[l]
                slot = contrib.setdefault(id(g), [g, 0.0])
                slot[1] += h.weight
            dens[l] = _mix(contrib, reduction)
        out.append(MdGlmbHypothesis._raw(labels, w, dens))
    return normalize(MdGlmbDensity(tuple(out)))


def extract_lmb(density: Density, reduction: MixtureReduction | None = None) -> LmbParams:
    """Existence = summed inclusion weight; density = labeled PHD / existence."""
    contrib: dict[Label, dict] = defaultdict(dict)
    exist: dict[Label, float] = defaultdict(float)
    for h in density.hypotheses:
        for l in h.labels:
            exist[l] += h.weight
            g = h.densities[l]
            slot = contrib[l].setdefault(id(g), [g, 0.0])
            slot[1] += h.weight
    tracks = []
    for l in sorted(exist):
        r = exist[l]
        if r <= 0:
            continue
        tracks.append(LmbTrack(l, min(r, 1.0), _mix(contrib[l], reduction)))
    return LmbParams(tuple(tracks))


# --------------------------------------------------------------------------
# ranked subsets of independent Bernoulli items


def iter_subsets(probs: Sequence[float], min_ratio: float = 0.0):
    """Lazily yield subsets of independent Bernoulli items, most likely first.

    Yields ``(included_indices, probability)``.  Items with probability 1 are
    always included and items with probability 0 never.  Subsets whose
    probability falls below ``min_ratio`` times the best one are not emitted.
    Enumeration flips items away from the most likely subset in order of
    increasing log-odds cost, so it never materializes the full power set.
    """
    probs = [float(p) for p in probs]
    base = []
    free = []
    for i, p in enumerate(probs):
        if p >= 1.0:
            base.append(i)
        elif p > 0.0:
            free.append(i)
            if p > 0.5:
                base.append(i)
    base_set = set(base)
    deltas = [abs(math.log(probs[i]) - math.log1p(-probs[i])) for i in free]
    order = sorted(range(len(free)), key=lambda t: (deltas[t], free[t]))
    d = [deltas[t] for t in order]
    items = [free[t] for t in order]
    max_delta = math.inf if min_ratio <= 0 else -math.log(min_ratio)

    def emit(flips):
        inc = set(base_set)
        for f in flips:
            inc ^= {items[f]}
        w = 1.0
        for i, p in enumerate(probs):
            w *= p if i in inc else 1.0 - p
        return tuple(sorted(inc)), w

    yield emit(())
    heap = [(d[0], (0,))] if d else []
    while heap:
        s, flips = heapq.heappop(heap)
        if s > max_delta:
            return
        item = emit(flips)
        if item[1] <= 0.0:
            return  # underflow; everything later is smaller still
        yield item
        j = flips[-1]
        if j + 1 < len(d):
            heapq.heappush(heap, (s + d[j + 1], flips + (j + 1,)))
            heapq.heappush(heap, (s - d[j] + d[j + 1], flips[:-1] + (j + 1,)))


def kbest_subsets(probs: Sequence[float], k: int | None = None, min_ratio: float = 0.0):
    """The ``k`` most likely subsets (all when ``k`` is None) as a list; see iter_subsets."""
    return list(itertools.islice(iter_subsets(probs, min_ratio), k))


def glmb_from_lmb(lmb: LmbParams, max_components: int | None) -> MdGlmbDensity:
    """Expand an LMB into its highest-weight label-set hypotheses."""
    tracks = lmb.tracks
    subsets = kbest_subsets([t.existence for t in tracks], max_components)
    hyps = []
    for idx, w in subsets:
        if w <= 0:
            continue
        hyps.append(
            MdGlmbHypothesis(
                tuple(tracks[i].label for i in idx), w, {tracks[i].label: tracks[i].density for i in idx}
            )
        )
    return normalize(MdGlmbDensity(tuple(hyps)))


# --------------------------------------------------------------------------
# JSON


def density_to_json(density: Density) -> dict:
    kind = "mdglmb" if isinstance(density, MdGlmbDensity) else "dglmb"
    hyps = []
    for h in density.hypotheses:
        doc = {
            "labels": [list(l) for l in h.labels],
            "weight": h.weight,
            "densities": [h.densities[l].to_json() for l in h.labels],
        }
        if kind == "dglmb":
            doc["history_id"] = h.history_id
            if h.association is not None:
                doc["association"] = list(h.association)
        hyps.append(doc)
    return {"type": kind, "hypotheses": hyps}


def density_from_json(doc: dict) -> Density:
    hyps = []
    for hd in doc["hypotheses"]:
        labels = tuple(Label(*l) for l in hd["labels"])
        dens = {l: GaussianMixture.from_json(g) for l, g in zip(labels, hd["densities"])}
        if doc["type"] == "dglmb":
            assoc = tuple(hd["association"]) if "association" in hd else None
            hyps.append(DGlmbHypothesis(labels, hd["history_id"], hd["weight"], dens, assoc))
        else:
            hyps.append(MdGlmbHypothesis(labels, hd["weight"], dens))
    cls = DGlmbDensity if doc["type"] == "dglmb" else MdGlmbDensity
    return cls(tuple(hyps))


def dumps(density: Density) -> str:
    return json.dumps(density_to_json(density))


def loads(text: str) -> Density:
    return density_from_json(json.loads(text))
