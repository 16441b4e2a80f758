"""Brute-force oracles that anchor every exactness test.

Both oracles enumerate the whole admissible space through the ranking
module's distance primitives, independently of the search engine's
pruned traversal, so an engine bug cannot hide in its own bound logic.
"""

from __future__ import annotations

import math
from itertools import combinations, permutations
from typing import Sequence

import numpy as np

from .corpus import DocumentGraph, RestrictionSet
from .ranking import (
    RankParams,
    ScoredSet,
    Variant,
    diss_distance,
    marginal_gain,
    rel_distance,
    score_of,
)

ADDENDUM_VERTEX_GUARD = 10_000
BEST_SET_COMBINATION_GUARD = 2_000_000


def _admissible(graph: DocumentGraph, restriction: RestrictionSet, exclude: set[int]) -> list[int]:
    return [
        v
        for v in range(graph.vertex_count)
        if v not in exclude and restriction.admits(v)
    ]


def oracle_best_addendum(
    graph: DocumentGraph,
    q: int,
    members: Sequence[int],
    restriction: RestrictionSet | None = None,
    params: RankParams | None = None,
) -> tuple[int, float]:
    """Linear scan of marginal_gain over every admissible vertex outside the set.

    Ties resolve to the lower vertex id. Guarded to graphs of at most
    10,000 vertices; this is a test oracle, not a production path.
    """
    if graph.vertex_count > ADDENDUM_VERTEX_GUARD:
        raise ValueError(f"oracle guard exceeded: |V| = {graph.vertex_count}")
    restriction = restriction or RestrictionSet.allow_all()
    params = params or RankParams()
    members = tuple(members)
    pool = _admissible(graph, restriction, set(members) | {q})
    if not pool:
        raise LookupError("no admissible vertex outside the source set")
    best_v, best_g = -1, math.inf
    for u in pool:
        g = marginal_gain(graph, q, members, u, params)
        if g < best_g or (g == best_g and u < best_v):
            best_v, best_g = u, g
    return best_v, best_g


def _ordered_score_arrays(
    graph: DocumentGraph, q: int, pool: list[int], params: RankParams
) -> tuple[np.ndarray, np.ndarray]:
    """Relevance vector and directed dissimilarity matrix over the pool."""
    k = len(pool)
    rel = np.array([rel_distance(graph, q, u, params) for u in pool])
    diss = np.zeros((k, k))
    for i, u in enumerate(pool):
        for j, w in enumerate(pool):
            if i != j:
                diss[i, j] = diss_distance(graph, u, w, params)
    return rel, diss


def oracle_best_set(
    graph: DocumentGraph,
    q: int,
    n: int,
    restriction: RestrictionSet | None = None,
    params: RankParams | None = None,
) -> ScoredSet:
    """Global minimum-score ordered set of n admissible vertices.

    For n <= 5 every ordering of every combination is evaluated (the
    directed dissimilarity legs make order matter). Larger n falls back to
    greedy-best insertion ordering per combination, which is documented as
    an approximation. Guarded by the combination count.
    """
    restriction = restriction or RestrictionSet.allow_all()
    params = params or RankParams()
    pool = _admissible(graph, restriction, {q})
    if len(pool) < n:
        raise LookupError(f"only {len(pool)} admissible vertices, need {n}")
    if math.comb(len(pool), n) > BEST_SET_COMBINATION_GUARD:
        raise ValueError("oracle guard exceeded: too many combinations")

    rel, diss = _ordered_score_arrays(graph, q, pool, params)
    lam = params.lambda_
    pool_arr = np.array(pool)

    if n == 1:
        scores = lam * rel
        best = int(np.argmin(scores))  # first occurrence = lowest id (pool is sorted)
        return ScoredSet((pool[best],), float(scores[best]))

    combos = np.array(list(combinations(range(len(pool)), n)), dtype=np.intp)
    if n <= 5:
        # pre-gather the n x n submatrices once, then sweep all orderings
        sub = diss[combos[:, :, None], combos[:, None, :]]  # (k, n, n)
        rel_sub = rel[combos]  # (k, n)
        perms = list(permutations(range(n)))
        best_scores = None
        best_perm_idx = None
        for pi, perm in enumerate(perms):
            if params.variant is Variant.MIN_AVG:
                pair = np.zeros(len(combos))
                for a in range(n):
                    for b in range(a + 1, n):
                        pair += sub[:, perm[a], perm[b]]
                scores = (lam / n) * rel_sub.sum(axis=1) - ((1.0 - lam) / (n * (n - 1))) * pair
            else:
                pair = np.full(len(combos), np.inf)
                for a in range(n):
                    for b in range(a + 1, n):
                        pair = np.minimum(pair, sub[:, perm[a], perm[b]])
                scores = lam * rel_sub.max(axis=1) - (1.0 - lam) * pair
            if best_scores is None:
                best_scores = scores.copy()
                best_perm_idx = np.zeros(len(combos), dtype=np.intp)
            else:
                better = scores < best_scores
                best_scores[better] = scores[better]
                best_perm_idx[better] = pi
        ci = int(np.argmin(best_scores))
        perm = perms[int(best_perm_idx[ci])]
        items = tuple(int(pool_arr[combos[ci, p]]) for p in perm)
        return ScoredSet(items, float(best_scores[ci]))

    # n > 5: greedy-best insertion ordering per combination (approximation)
    best_set: tuple[int, ...] | None = None
    best_score = math.inf
    for combo in combos:
        remaining = [int(pool_arr[i]) for i in combo]
        ordered: list[int] = []
        while remaining:
            cand = min(
                remaining,
                key=lambda u: (marginal_gain(graph, q, ordered, u, params), u),
            )
            ordered.append(cand)
            remaining.remove(cand)
        s = score_of(graph, q, ordered, params)
        if s < best_score:
            best_score, best_set = s, tuple(ordered)
    return ScoredSet(best_set, best_score)
