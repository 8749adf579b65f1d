"""Optimal and k-best rectangular assignment.

A cost matrix has one row per track and at least as many columns as rows;
every row is assigned to a distinct column.  Forbidden cells hold ``inf``.
Assignments are returned as tuples ``a`` with ``a[i]`` the column of row ``i``.
"""

from __future__ import annotations

import heapq

import numpy as np
from scipy.optimize import linear_sum_assignment


class InfeasibleAssignment(ValueError):
    pass


def assignment_cost(cost: np.ndarray, assignment) -> float:
    """Total cost summed in row order (the summation order used everywhere)."""
    total = 0.0
    for i, j in enumerate(assignment):
        total += cost[i, j]
    return float(total)


def _solve(cost: np.ndarray):
    n, m = cost.shape
    if n == 0:
        return ()
    try:
        rows, cols = linear_sum_assignment(cost)
    except ValueError:
        return None
    a = [0] * n
    for r, c in zip(rows, cols):
        a[r] = int(c)
    if not np.all(np.isfinite(cost[np.arange(n), a])):
        return None
    return tuple(a)


def hungarian(cost) -> tuple[tuple[int, ...], float]:
    """Minimum-cost assignment of every row to a distinct column."""
    cost = np.asarray(cost, dtype=float)
    if cost.ndim != 2 or cost.shape[0] > cost.shape[1]:
        raise ValueError("cost matrix must be 2-D with rows <= columns")
    a = _solve(cost)
    if a is None:
        raise InfeasibleAssignment("no feasible assignment")
    return a, assignment_cost(cost, a)


def murty_kbest(
    cost, K: int, rtol: float = 1e-12, complete_ties: bool = True
) -> list[tuple[tuple[int, ...], float]]:
    """The K lowest-cost assignments in non-decreasing cost order.

    Ties (costs equal within ``rtol``) are ordered lexicographically by the
    assignment vector; a tie group straddling position K is completed before
    sorting so the cut is deterministic.  ``complete_ties=False`` skips that
    completion (the K costs are still the K best) and stops as soon as K
    assignments are found.
    """
    if K < 1:
        raise ValueError("K must be positive")
    out: list[tuple[tuple[int, ...], float]] = []
    for sol, c in murty_iter(cost):
        if len(out) >= K and not _tied(c, out[-1][1], rtol):
            break
        out.append((sol, c))
        if len(out) >= K and not complete_ties:
            break
    return _tie_sort(out, rtol)[:K]


def murty_iter(cost):
    """Lazily yield every feasible assignment in non-decreasing cost.

    Each node of the search is partitioned only when the next assignment is
    requested, so taking the first k costs about k partitions.
    """
    cost = np.asarray(cost, dtype=float)
    n, m = cost.shape
    if n > m:
        raise ValueError("cost matrix must have rows <= columns")
    first = _solve(cost)
    if first is None:
        return
    if n == 0:
        yield (), 0.0
        return

    # a node is (solution, per-row forced column or -1, per-row banned columns)
    counter = 0
    heap = [(assignment_cost(cost, first), first, counter, (-1,) * n, ((),) * n)]
    while heap:
        c, sol, _, forced, banned = heapq.heappop(heap)
        yield sol, c
        # partition the remaining space of this node around ``sol``
        forced = list(forced)
        for i in range(n):
            if forced[i] >= 0:
                continue
            child_banned = list(banned)
            child_banned[i] = banned[i] + (sol[i],)
            sub = _subproblem(cost, forced, child_banned)
            child = _solve(sub)
            if child is not None:
                counter += 1
                heapq.heappush(
                    heap,
                    (assignment_cost(cost, child), child, counter, tuple(forced), tuple(child_banned)),
                )
            forced[i] = sol[i]


def _tied(a: float, b: float, rtol: float) -> bool:
    return a == b or abs(a - b) <= rtol * max(abs(a), abs(b))


def _subproblem(cost: np.ndarray, forced, banned) -> np.ndarray:
    sub = cost.copy()
    for i, j in enumerate(forced):
        if j >= 0:
            keep = sub[i, j]
            sub[i, :] = np.inf
            sub[:, j] = np.inf
            sub[i, j] = keep
    for i, cols in enumerate(banned):
        for j in cols:
            sub[i, j] = np.inf
    return sub


def _tie_sort(sols, rtol):
    """Reorder runs of tied costs lexicographically by assignment."""
    out = []
    i = 0
    while i < len(sols):
        j = i + 1
        while j < len(sols) and _tied(sols[j][1], sols[i][1], rtol):
            j += 1
        out.extend(sorted(sols[i:j], key=lambda s: (s[1], s[0])))
        i = j
    return out
