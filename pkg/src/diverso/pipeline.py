"""Greedy seeding, hill-climbing refinement and the combined pipeline.

greeverso grows k_g candidate sets level by level: each round consumes
the gain-sorted addendum streams of the surviving branches through a
k-way merge, so the k_g best children of a round are found with exactly
k_g stream pops. interverso refines the seeds by deleting one member at
a time and streaming optimal replacements from the deleted subset's
iterator, keeping the k_c best complete sets seen anywhere.

All iterators of one pipeline invocation share a per-query cache of
saturated source searches, so the graph around the query center and the
recurring set members is explored once.

Time-outs degrade, never fail: t_d bounds each single-addendum search
(the best settled candidate is returned when it trips) and t_c cuts off
hill climbing as a whole; every returned set always has full cardinality.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass
from typing import Sequence

from .corpus import DocumentGraph, RestrictionSet
from .engine import DivIterator, SourceSearch
from .metrics import UNIT_ID, UNIT_SCORE, MemoryMeter
from .ranking import RankParams, ScoredSet, score_of

T_C_DEFAULT_MULTIPLE = 3


@dataclass
class PipelineConfig:
    """Pipeline knobs: result size, branch widths and time-outs (ms, 0 = off).

    When t_d is set and t_c is not, t_c defaults to a multiple
    (3 x n x k_g) of the per-addendum budget so every seed can still be
    refined by at least a few elements.
    """

    n: int = 10
    k_g: int = 2
    k_c: int = 2
    t_d_ms: float = 0.0
    t_c_ms: float | None = None
    max_iterations: int | None = None

    def __post_init__(self):
        if self.n < 1 or self.k_g < 1 or self.k_c < 1:
            raise ValueError("n, k_g and k_c must all be >= 1")
        if self.t_d_ms < 0:
            raise ValueError("t_d_ms must be >= 0")
        if self.t_c_ms is None:
            self.t_c_ms = (
                T_C_DEFAULT_MULTIPLE * self.n * self.k_g * self.t_d_ms
                if self.t_d_ms > 0
                else 0.0
            )
        if self.t_c_ms < 0:
            raise ValueError("t_c_ms must be >= 0")


class _Branch:
    """A partial greedy set and the iterator lineage that grows it."""

    __slots__ = ("items", "score", "parent_iter", "chosen", "own_iter")

    def __init__(self, items, score, parent_iter, chosen):
        self.items = items
        self.score = score
        self.parent_iter = parent_iter
        self.chosen = chosen
        self.own_iter: DivIterator | None = None

    def iterator(self) -> DivIterator:
        if self.own_iter is None:
            self.own_iter = self.parent_iter.expand(self.chosen)
        return self.own_iter


def greeverso(
    graph: DocumentGraph,
    q: int,
    n: int,
    restriction: RestrictionSet | None = None,
    k_g: int = 2,
    params: RankParams | None = None,
    *,
    t_d_ms: float = 0.0,
    meter: MemoryMeter | None = None,
    search_cache: dict[int, SourceSearch] | None = None,
) -> list[ScoredSet]:
    """Greedy construction of up to k_g diversified sets of exactly n items.

    Seed i starts from the i-th most relevant admissible vertex; each
    following round keeps the k_g best one-item extensions across all
    surviving branches. Raises when fewer than n admissible vertices
    exist. The greedy stage is never cut off as a whole (that could leave
    sets short of n); only the per-addendum budget applies.
    """
    graph.check_vertex(q)
    restriction = restriction or RestrictionSet.allow_all()
    params = params or RankParams()
    if n < 1 or k_g < 1:
        raise ValueError("n and k_g must be >= 1")
    available = restriction.admissible_count(graph, exclude=[q])
    if available < n:
        raise ValueError(
            f"cannot build sets of {n} items: only {available} admissible "
            f"vertices outside the query center"
        )
    if search_cache is None:
        search_cache = {}

    base = DivIterator(graph, q, (), restriction, params, meter=meter, search_cache=search_cache)
    branches: list[_Branch] = []
    while base.has_next() and len(branches) < k_g:
        v, gain = base.next(t_d_ms)
        branches.append(_Branch((v,), gain, base, v))

    for _depth in range(2, n + 1):
        # k-way merge over the branches' sorted addendum streams
        heap: list[tuple[float, int, int]] = []
        seq = 0
        live = []
        for b in branches:
            it = b.iterator()
            if it.has_next():
                _, peek_gain = it.peek(t_d_ms)
                heap.append((b.score + peek_gain, seq, len(live)))
                live.append(b)
                seq += 1
        heapq.heapify(heap)
        children: list[_Branch] = []
        while heap and len(children) < k_g:
            _, _, bi = heapq.heappop(heap)
            b = live[bi]
            it = b.iterator()
            v, gain = it.next(t_d_ms)
            children.append(_Branch(b.items + (v,), b.score + gain, it, v))
            if it.has_next():
                _, peek_gain = it.peek(t_d_ms)
                seq += 1
                heapq.heappush(heap, (b.score + peek_gain, seq, bi))
        parents = {id(c.parent_iter) for c in children}
        for b in branches:
            if b.own_iter is not None and id(b.own_iter) not in parents:
                b.own_iter.release()
        branches = children
        if not branches:
            break
    base.release()
    for b in branches:
        if b.own_iter is not None:
            b.own_iter.release()

    out = [ScoredSet(b.items, b.score) for b in branches]
    out.sort(key=lambda s: (s.score, s.items))
    return out


class _SubsetTask:
    """A queued (n-1)-subset; its replacement iterator materializes on pop."""

    __slots__ = ("items", "score", "iterator", "parent", "out", "in_")

    def __init__(self, items, score, iterator=None, parent=None, out=None, in_=None):
        self.items = items
        self.score = score
        self.iterator = iterator
        self.parent = parent
        self.out = out
        self.in_ = in_

    def materialize(self, graph, q, restriction, params, meter, search_cache) -> DivIterator:
        if self.iterator is None:
            if self.parent is not None:
                self.iterator = self.parent.replace(self.out, self.in_)
            else:
                self.iterator = DivIterator(
                    graph, q, self.items, restriction, params,
                    meter=meter, search_cache=search_cache,
                )
        return self.iterator


def interverso(
    graph: DocumentGraph,
    q: int,
    restriction: RestrictionSet | None,
    seeds: Sequence[ScoredSet],
    k_c: int = 2,
    params: RankParams | None = None,
    *,
    t_d_ms: float = 0.0,
    t_c_ms: float = 0.0,
    max_iterations: int | None = None,
    meter: MemoryMeter | None = None,
    search_cache: dict[int, SourceSearch] | None = None,
) -> list[ScoredSet]:
    """Hill-climbing refinement of the seed sets; returns the k_c best.

    Every (n-1)-subset of a processed set streams optimal replacements;
    derived subsets are queued again only when they outscore their parent
    and can still beat the current k_c-th candidate. The seeds join the
    candidate pool up front, so the best returned score never exceeds the
    best seed score. Subsets reached through different removals are
    deduplicated by their sorted member key.
    """
    if not seeds:
        raise ValueError("interverso needs at least one seed set")
    restriction = restriction or RestrictionSet.allow_all()
    params = params or RankParams()
    n = len(seeds[0].items)
    if any(len(s.items) != n for s in seeds):
        raise ValueError("all seeds must share one cardinality")
    if search_cache is None:
        search_cache = {}

    best_seeds = sorted(seeds, key=lambda s: (s.score, s.items))
    if n == 1:
        return best_seeds[:k_c]

    deadline = time.monotonic() + t_c_ms / 1000.0 if t_c_ms > 0 else None

    # worst-at-head candidate pool so the head is the eviction threshold
    candidates: list[tuple[float, tuple[int, ...]]] = []

    def cand_push(score: float, items: tuple[int, ...]) -> None:
        entry = (-score, items)
        if len(candidates) < k_c:
            heapq.heappush(candidates, entry)
        elif score < -candidates[0][0]:
            heapq.heapreplace(candidates, entry)

    def cand_threshold() -> float:
        return -candidates[0][0]

    for seed in best_seeds:
        cand_push(seed.score, seed.items)

    subsets: list[tuple[float, int, _SubsetTask]] = []
    seen: set[tuple[int, ...]] = set()
    seq = 0
    for seed in best_seeds:
        for s in seed.items:
            sub = tuple(x for x in seed.items if x != s)
            key = tuple(sorted(sub))
            if key in seen:
                continue
            seen.add(key)
            heapq.heappush(
                subsets, (score_of(graph, q, sub, params), seq, _SubsetTask(sub, None))
            )
            seq += 1

    retired: list[DivIterator] = []
    iterations = 0
    timed_out = False
    while subsets and not timed_out:
        if deadline is not None and time.monotonic() >= deadline:
            break
        if max_iterations is not None and iterations >= max_iterations:
            break
        iterations += 1
        sub_score, _, task = heapq.heappop(subsets)
        sub = task.items
        it = task.materialize(graph, q, restriction, params, meter, search_cache)
        while it.has_next():
            if deadline is not None and time.monotonic() >= deadline:
                timed_out = True
                break
            replacement, gain = it.next(t_d_ms)
            aug = sub + (replacement,)
            aug_score = sub_score + gain

            for s in sub:
                new_sub = tuple(x for x in aug if x != s)
                key = tuple(sorted(new_sub))
                if key in seen:
                    continue
                new_score = score_of(graph, q, new_sub, params)
                if new_score < sub_score and (
                    len(candidates) < k_c or new_score < cand_threshold()
                ):
                    seen.add(key)
                    heapq.heappush(
                        subsets,
                        (new_score, seq, _SubsetTask(new_sub, None, parent=it, out=s, in_=replacement)),
                    )
                    seq += 1

            if len(candidates) < k_c:
                cand_push(aug_score, aug)
            elif aug_score < cand_threshold():
                cand_push(aug_score, aug)
            else:
                break  # later replacements only score worse
        retired.append(it)
        if meter is not None:
            meter.extra = len(subsets) * (UNIT_SCORE + (n - 1) * UNIT_ID) + len(candidates) * (
                UNIT_SCORE + n * UNIT_ID
            )
            meter.checkpoint()
    for it in retired:
        it.release()
    for _, _, task in subsets:
        if task.iterator is not None:
            task.iterator.release()

    out = [ScoredSet(items, score) for score, items in ((-s, i) for s, i in candidates)]
    out.sort(key=lambda s: (s.score, s.items))
    return out


@dataclass
class PhaseMetrics:
    elapsed_ms: float
    logical_bytes_peak: int
    score: float


def diversify(
    graph: DocumentGraph,
    q: int,
    n: int | None = None,
    restriction: RestrictionSet | None = None,
    config: PipelineConfig | None = None,
    params: RankParams | None = None,
) -> ScoredSet:
    """Greedy seeds refined by hill climbing; the best resulting set.

    Deterministic for fixed inputs when both time-outs are disabled.
    """
    best, _ = diversify_with_metrics(graph, q, n, restriction, config, params)
    return best


def diversify_with_metrics(
    graph: DocumentGraph,
    q: int,
    n: int | None = None,
    restriction: RestrictionSet | None = None,
    config: PipelineConfig | None = None,
    params: RankParams | None = None,
) -> tuple[ScoredSet, dict[str, PhaseMetrics]]:
    """diversify plus per-phase wall time, structure census peak and score.

    Phase boundaries are exactly the two pipeline stages: the greedy
    seeder and the hill-climbing refiner.
    """
    config = config or PipelineConfig()
    if n is None:
        n = config.n
    params = params or RankParams()
    restriction = restriction or RestrictionSet.allow_all()
    search_cache: dict[int, SourceSearch] = {}

    meter_g = MemoryMeter()
    t0 = time.monotonic()
    seeds = greeverso(
        graph, q, n, restriction, config.k_g, params,
        t_d_ms=config.t_d_ms, meter=meter_g, search_cache=search_cache,
    )
    greedy_ms = (time.monotonic() - t0) * 1000.0
    greedy = PhaseMetrics(greedy_ms, meter_g.peak, min(s.score for s in seeds))

    meter_c = MemoryMeter()
    t1 = time.monotonic()
    refined = interverso(
        graph, q, restriction, seeds, config.k_c, params,
        t_d_ms=config.t_d_ms, t_c_ms=config.t_c_ms,
        max_iterations=config.max_iterations, meter=meter_c, search_cache=search_cache,
    )
    hill_ms = (time.monotonic() - t1) * 1000.0
    best = refined[0]
    hill = PhaseMetrics(hill_ms, meter_c.peak, best.score)
    return best, {"greedy": greedy, "hillclimb": hill}
