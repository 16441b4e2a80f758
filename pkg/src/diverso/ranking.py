"""Ranking functions for diversified sets.

Two variants share one sign convention: relevance enters positively and
pairwise dissimilarity negatively, so lower scores always mean better
sets. The min-avg variant averages relevance distances and subtracts the
N(N-1)-normalized sum over ordered pairs; the min-max variant takes the
worst relevance distance minus the smallest pairwise dissimilarity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .corpus import DocumentGraph, graph_distance, text_distance


class Variant(Enum):
    MIN_AVG = "avg"
    MIN_MAX = "max"

    @classmethod
    def parse(cls, name: str) -> "Variant":
        key = str(name).strip().lower()
        for v in cls:
            if key in (v.value, v.name.lower()):
                return v
        raise ValueError(f"unknown ranking variant {name!r} (use 'avg' or 'max')")


@dataclass(frozen=True)
class RankParams:
    """Trade-off knobs of the ranking functions.

    lambda_ weighs relevance against result dissimilarity, alpha mixes
    graph vs text distance inside relevance, beta does the same inside
    dissimilarity. All three live in [0, 1].
    """

    lambda_: float = 0.8
    alpha: float = 0.0
    beta: float = 0.8
    variant: Variant = Variant.MIN_AVG

    def __post_init__(self):
        for name in ("lambda_", "alpha", "beta"):
            val = getattr(self, name)
            if not (0.0 <= val <= 1.0):
                raise ValueError(f"{name} must be in [0, 1], got {val}")
        if not isinstance(self.variant, Variant):
            object.__setattr__(self, "variant", Variant.parse(self.variant))


@dataclass(frozen=True)
class ScoredSet:
    """Ordered result list with its score; position is insertion rank."""

    items: tuple[int, ...]
    score: float

    def __post_init__(self):
        if len(set(self.items)) != len(self.items):
            raise ValueError("duplicate items in result set")

    @classmethod
    def compute(cls, g: DocumentGraph, q: int, items: Sequence[int], params: RankParams) -> "ScoredSet":
        items = tuple(items)
        return cls(items, score_of(g, q, items, params))


def _text_leg(g: DocumentGraph, u: int, v: int) -> float:
    """Text distance with the empty-vector fallback.

    Documents without any weighted term cannot be compared by cosine;
    inside the ranking functions they count as maximally distant rather
    than raising, so they can still appear in results.
    """
    if u == v:
        return 0.0
    vu, vv = g.docs[u].vector, g.docs[v].vector
    if not vu or not vv:
        return 1.0
    return text_distance(vu, vv)


def rel_distance(g: DocumentGraph, q: int, u: int, params: RankParams) -> float:
    """Relevance distance: alpha * d_graph(q, u) + (1 - alpha) * d_text(q, u).

    The graph leg is oriented from the query center to the result item.
    """
    g.check_vertex(q)
    g.check_vertex(u)
    a = params.alpha
    dg = graph_distance(g, q, u) if a > 0.0 else 0.0
    return a * dg + (1.0 - a) * _text_leg(g, q, u)


def diss_distance(g: DocumentGraph, v: int, w: int, params: RankParams) -> float:
    """Dissimilarity distance: beta * d_graph(v, w) + (1 - beta) * d_text(v, w).

    The graph leg runs from the earlier result item to the later one
    (v precedes w in insertion order).
    """
    g.check_vertex(v)
    g.check_vertex(w)
    b = params.beta
    dg = graph_distance(g, v, w) if b > 0.0 else 0.0
    return b * dg + (1.0 - b) * _text_leg(g, v, w)


def score_of(g: DocumentGraph, q: int, items: Sequence[int], params: RankParams) -> float:
    """Score of the ordered set `items` for query center q (lower is better).

    MIN_AVG: (lam/N) * sum d_rel - ((1-lam)/(N(N-1))) * sum over ordered
    pairs of d_diss. MIN_MAX: lam * max d_rel - (1-lam) * min over ordered
    pairs of d_diss. Singleton sets have a zero dissimilarity term.
    """
    items = tuple(items)
    if not items:
        raise ValueError("score_of requires a non-empty set")
    if len(set(items)) != len(items):
        raise ValueError("duplicate items in result set")
    lam = params.lambda_
    n = len(items)
    rels = [rel_distance(g, q, u, params) for u in items]
    if params.variant is Variant.MIN_AVG:
        rel_term = (lam / n) * sum(rels)
        if n == 1:
            return rel_term
        pair_sum = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                pair_sum += diss_distance(g, items[i], items[j], params)
        return rel_term - ((1.0 - lam) / (n * (n - 1))) * pair_sum
    # MIN_MAX
    rel_term = lam * max(rels)
    if n == 1:
        return rel_term
    pair_min = min(
        diss_distance(g, items[i], items[j], params)
        for i in range(n)
        for j in range(i + 1, n)
    )
    return rel_term - (1.0 - lam) * pair_min


def marginal_gain(g: DocumentGraph, q: int, items: Sequence[int], u: int, params: RankParams) -> float:
    """Change in score when u is appended to the ordered set `items`.

    Computed through the incremental forms rather than two full score
    evaluations; equal to score_of(items + [u]) - score_of(items) within
    float tolerance. With an empty set the gain is score_of([u]) itself
    (the score of the singleton, dissimilarity term zero).
    """
    items = tuple(items)
    if u in items:
        raise ValueError(f"vertex {u} already in the set")
    g.check_vertex(u)
    lam = params.lambda_
    n = len(items)
    d_rel_u = rel_distance(g, q, u, params)

    if params.variant is Variant.MIN_AVG:
        if n == 0:
            return lam * d_rel_u
        d_diss_sum = sum(diss_distance(g, s, u, params) for s in items)
        rel_sum = sum(rel_distance(g, q, s, params) for s in items)
        const = -lam * rel_sum / (n * (n + 1))
        if n >= 2:
            pair_sum = 0.0
            for i in range(n):
                for j in range(i + 1, n):
                    pair_sum += diss_distance(g, items[i], items[j], params)
            const += 2.0 * (1.0 - lam) * pair_sum / (n * (n * n - 1))
        return const + (lam * d_rel_u - ((1.0 - lam) / n) * d_diss_sum) / (n + 1)

    # MIN_MAX
    if n == 0:
        return lam * d_rel_u
    rel_max = max(rel_distance(g, q, s, params) for s in items)
    if n == 1:
        return lam * max(0.0, d_rel_u - rel_max) - (1.0 - lam) * diss_distance(g, items[0], u, params)
    diss_min_u = min(diss_distance(g, s, u, params) for s in items)
    pair_min = min(
        diss_distance(g, items[i], items[j], params)
        for i in range(n)
        for j in range(i + 1, n)
    )
    gain = 0.0
    if d_rel_u > rel_max:
        gain += lam * (d_rel_u - rel_max)
    if diss_min_u < pair_min:
        gain += (1.0 - lam) * (pair_min - diss_min_u)
    return gain


def minmax_branch(g: DocumentGraph, q: int, items: Sequence[int], u: int, params: RankParams) -> int:
    """Which of the four min-max gain cases applies (1..4); needs |items| >= 2.

    1: neither term worsens, 2: only relevance worsens, 3: only the
    pairwise minimum shrinks, 4: both.
    """
    items = tuple(items)
    if len(items) < 2:
        raise ValueError("branch analysis needs at least two set members")
    d_rel_u = rel_distance(g, q, u, params)
    rel_max = max(rel_distance(g, q, s, params) for s in items)
    diss_min_u = min(diss_distance(g, s, u, params) for s in items)
    pair_min = min(
        diss_distance(g, items[i], items[j], params)
        for i in range(len(items))
        for j in range(i + 1, len(items))
    )
    worsens_rel = d_rel_u > rel_max
    shrinks_min = diss_min_u < pair_min
    if not worsens_rel and not shrinks_min:
        return 1
    if worsens_rel and not shrinks_min:
        return 2
    if not worsens_rel and shrinks_min:
        return 3
    return 4
