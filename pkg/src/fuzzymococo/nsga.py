"""Multiobjective primitives: Pareto dominance over (performance, complexity),
fast non-dominated sorting, crowding distances normalised by fixed global
objective bounds, and the crowded-comparison ordering.

Performance is maximised, complexity minimised. Ranks are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ObjectivePoint:
    perf: float
    complexity: float


@dataclass(frozen=True)
class MoAnnotation:
    rank: int
    crowding_dist: float


@dataclass(frozen=True)
class ObjectiveBounds:
    perf_range: tuple[float, float]
    complexity_range: tuple[float, float]

    def __post_init__(self):
        if self.perf_range[0] > self.perf_range[1]:
            raise ValueError(f"empty perf range {self.perf_range}")
        if self.complexity_range[0] > self.complexity_range[1]:
            raise ValueError(f"empty complexity range {self.complexity_range}")


def dominates(a: ObjectivePoint, b: ObjectivePoint) -> bool:
    """True iff a is at least as good as b in both objectives and strictly
    better in at least one."""
    return (
        a.perf >= b.perf
        and a.complexity <= b.complexity
        and (a.perf > b.perf or a.complexity < b.complexity)
    )


def _objective_arrays(points):
    perf = np.array([p.perf for p in points], dtype=float)
    comp = np.array([p.complexity for p in points], dtype=float)
    return perf, comp


def dominance_matrix(perf: np.ndarray, comp: np.ndarray) -> np.ndarray:
    """Boolean matrix D with D[i, j] true iff point i dominates point j."""
    ge = perf[:, None] >= perf[None, :]
    le = comp[:, None] <= comp[None, :]
    strict = (perf[:, None] > perf[None, :]) | (comp[:, None] < comp[None, :])
    return ge & le & strict

def ranks_from_dominance(dom: np.ndarray) -> np.ndarray:
    """Peel non-dominated fronts off a dominance matrix; 1-based ranks."""
    n = dom.shape[0]
    n_dominators = dom.sum(axis=0)
    ranks = np.zeros(n, dtype=np.int64)
    unranked = np.ones(n, dtype=bool)
    rank = 0
    while unranked.any():
        rank += 1
        front = unranked & (n_dominators == 0)
        ranks[front] = rank
        n_dominators = n_dominators - dom[front].sum(axis=0)
        unranked &= ~front
    return ranks


def fast_non_dominated_sort(points) -> list[int]:
    """Pareto front rank per point (1 = non-dominated)."""
    if len(points) == 0:
        raise ValueError("cannot sort an empty point list")
    perf, comp = _objective_arrays(points)
    return [int(r) for r in ranks_from_dominance(dominance_matrix(perf, comp))]


def _crowding_from_arrays(perf, comp, bounds: ObjectiveBounds) -> np.ndarray:
    n = perf.shape[0]
    dist = np.zeros(n)
    if n <= 2:
        dist[:] = np.inf
        return dist
    for values, (lo, hi) in ((perf, bounds.perf_range), (comp, bounds.complexity_range)):
        width = hi - lo if hi > lo else 1.0
        order = np.argsort(values, kind="stable")
        sorted_values = values[order]
        dist[order[1:-1]] += (sorted_values[2:] - sorted_values[:-2]) / width
        # Every point attaining the front's extreme value counts as a
        # boundary point, so duplicated extremes tie at infinity.
        dist[values == sorted_values[0]] = np.inf
        dist[values == sorted_values[-1]] = np.inf
    return dist


def assign_crowding_dists(front, bounds: ObjectiveBounds) -> list[float]:
    """Crowding distance per point of one front, normalised by the global
    objective bounds; the boundary points of each objective get infinity."""
    perf, comp = _objective_arrays(front)
    return [float(d) for d in _crowding_from_arrays(perf, comp, bounds)]


def annotate(points, bounds: ObjectiveBounds) -> list[MoAnnotation]:
    """Front ranks plus per-front crowding distances for a point collection."""
    perf, comp = _objective_arrays(points)
    ranks = ranks_from_dominance(dominance_matrix(perf, comp))
    crowding = np.empty(len(points))
    for rank in np.unique(ranks):
        idx = np.flatnonzero(ranks == rank)
        crowding[idx] = _crowding_from_arrays(perf[idx], comp[idx], bounds)
    return [MoAnnotation(int(r), float(c)) for r, c in zip(ranks, crowding)]


def crowded_comparison_order(annotations) -> list[int]:
    """Index order under the crowded comparison: ascending rank, then
    descending crowding distance, stable on exact ties."""
    return sorted(
        range(len(annotations)),
        key=lambda i: (annotations[i].rank, -annotations[i].crowding_dist),
    )


def crowded_comparison_sort(items, points=None, bounds=None, annotations=None) -> list:
    """Sort items by the crowded comparison operator.

    Pass precomputed `annotations` to reuse globally assigned ranks and
    crowding distances; otherwise supply `points` (the items' objective
    values) and `bounds`, and both are recomputed over this collection.
    """
    if annotations is None:
        if points is None or bounds is None:
            raise ValueError("need either annotations or points plus bounds")
        annotations = annotate(points, bounds)
    return [items[i] for i in crowded_comparison_order(annotations)]
