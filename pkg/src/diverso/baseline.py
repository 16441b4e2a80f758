"""Adapted BestCoverage baseline for comparison runs.

A greedy loop that, each round, only looks at vertices within `ell` hops
of the current result plus the query center, ranks at most n * delta^ell
of them (delta = mean out-degree) and takes the best. The per-vertex
objective is the same marginal gain our own methods use, so score
comparisons stay objective-consistent; the hop cap is the baseline's
defining limitation (nothing farther than n * ell hops from the query
center is ever examined).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .corpus import DocumentGraph, RestrictionSet
from .metrics import UNIT_ID, UNIT_SCORE, MemoryMeter
from .ranking import RankParams, ScoredSet, marginal_gain, score_of


@dataclass(frozen=True)
class BaselineParams:
    """Hop radius and the content-adapted ranking parameters."""

    ell: int = 2
    params: RankParams = RankParams()

    def __post_init__(self):
        if self.ell < 1:
            raise ValueError("ell must be >= 1")


def _hop_pool(
    graph: DocumentGraph,
    sources: Sequence[int],
    ell: int,
    restriction: RestrictionSet,
    exclude: set[int],
    cap: int,
) -> list[int]:
    """Admissible vertices within ell hops of the sources, BFS order, capped."""
    adj = graph.adjacency()
    hops = {s: 0 for s in sources}
    queue = deque(sources)
    pool: list[int] = []
    while queue:
        u = queue.popleft()
        if hops[u] >= ell:
            continue
        for v, _w in adj[u]:
            if v in hops:
                continue
            hops[v] = hops[u] + 1
            queue.append(v)
            if v not in exclude and restriction.admits(v):
                pool.append(v)
                if len(pool) >= cap:
                    return pool
    return pool


def best_coverage(
    graph: DocumentGraph,
    q: int,
    n: int,
    restriction: RestrictionSet | None = None,
    bp: BaselineParams | None = None,
    meter: MemoryMeter | None = None,
) -> ScoredSet:
    """Greedy n-round selection restricted to the ell-hop neighborhood.

    Raises when a round finds no admissible vertex within reach.
    """
    graph.check_vertex(q)
    restriction = restriction or RestrictionSet.allow_all()
    bp = bp or BaselineParams()
    params = bp.params
    delta = max(graph.mean_out_degree, 1.0)
    cap = max(1, math.ceil(n * delta**bp.ell))

    result: list[int] = []
    for _round in range(n):
        exclude = set(result) | {q}
        pool = _hop_pool(graph, [q] + result, bp.ell, restriction, exclude, cap)
        if not pool:
            raise LookupError(
                f"best_coverage found no admissible vertex within {bp.ell} hops "
                f"after {len(result)} of {n} rounds"
            )
        best_v, best_g = -1, math.inf
        for u in pool:
            g = marginal_gain(graph, q, result, u, params)
            if g < best_g or (g == best_g and u < best_v):
                best_v, best_g = u, g
        result.append(best_v)
        if meter is not None:
            meter.extra = max(
                meter.extra,
                len(pool) * (UNIT_ID + UNIT_SCORE) + len(result) * UNIT_ID,
            )
            meter.checkpoint()
    return ScoredSet(tuple(result), score_of(graph, q, result, params))
