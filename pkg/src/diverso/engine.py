"""Exact best-addendum search over a document graph.

A DivIterator coordinates one best-first expansion per source (the query
center plus every current result member) and emits addendum vertices in
non-decreasing marginal-gain order. Exactness comes from optimistic score
completion: a vertex not yet settled from the relevance source is
completed with that search's current radius (its distance can only be
larger), while a vertex not yet settled from a dissimilarity source is
completed with the maximal normalized distance 1.0 (larger is better
under the negative sign). A candidate is emitted only once its exact gain
beats the optimistic bound of every partially settled vertex and of the
wholly unseen region. The per-source scale factors (lambda*alpha for the
query center, (1-lambda)*beta with the min-avg 1/N weights folded in for
set members) appear throughout the bound and scheduling computations.

Each source search settles every vertex at most once per iterator, so no
edge is relaxed twice per source. A search whose frontier empties, or
whose reach meets the graph diameter, saturates: every vertex it never
settled is permanently assigned normalized distance 1.0, its leg row is
materialized, and the frozen search is published to a per-query cache so
other iterators over the same source reuse it outright. A source that is
being ground through one settle at a time past a threshold is saturated
in bulk instead (the settle order no longer matters once exhaustion is
inevitable; the per-edge relaxation bound still holds).

expand()/replace() derive a new iterator for a grown or swapped source
set: retained searches are shared (frozen) or copied (live), previously
emitted vertices and candidates re-enter the partial index pending the
new source, so a derived iterator emits exactly what a freshly built one
would. Partial-index entries keep the bound computed when last touched;
stored values only ever understate the live bound, which is what the
head-C refresh scan of the index assumes.
"""

from __future__ import annotations

import heapq
import os
import time
from bisect import bisect_left, insort
from typing import Iterator, Sequence

import numpy as np

from .corpus import DocumentGraph, RestrictionSet, RestrictionMode
from .metrics import UNIT_ID, UNIT_MASK, UNIT_SCORE, UNIT_WEIGHT
from .ranking import RankParams, Variant, diss_distance, rel_distance

_UNDISCOVERED = 0
_PARTIAL = 1
_CANDIDATE = 2
_EMITTED = 3

_CHUNK = 64
_BULK_SETTLE_THRESHOLD = 512

DEBUG_BOUNDS_ENV = "DIVERSO_DEBUG_BOUNDS"


class SourceSearch:
    """Best-first (Dijkstra) expansion state for one source vertex.

    `settled` maps vertices to final raw path weights; `frontier` is the
    usual lazy-deletion min-heap. `relaxations` counts out-edge scans.
    Once frozen the search is immutable, carries a materialized normalized
    leg row, and may be shared across iterators.
    """

    __slots__ = ("source", "settled", "frontier", "relaxations", "started", "frozen", "row_norm")

    def __init__(self, source: int):
        self.source = source
        self.settled: dict[int, float] = {}
        self.frontier: list[tuple[float, int]] = []
        self.relaxations = 0
        self.started = False
        self.frozen = False
        self.row_norm: np.ndarray | None = None

    def clone(self) -> "SourceSearch":
        if self.frozen:
            return self
        c = SourceSearch(self.source)
        c.settled = dict(self.settled)
        c.frontier = list(self.frontier)
        c.relaxations = self.relaxations
        c.started = self.started
        return c

    def start(self, adj) -> None:
        self.started = True
        self.settled[self.source] = 0.0
        for t, w in adj[self.source]:
            self.relaxations += 1
            heapq.heappush(self.frontier, (w, t))

    def head(self) -> float | None:
        f = self.frontier
        settled = self.settled
        while f and f[0][1] in settled:
            heapq.heappop(f)
        return f[0][0] if f else None

    def settle_next(self, adj) -> tuple[int, float] | None:
        f = self.frontier
        settled = self.settled
        while f and f[0][1] in settled:
            heapq.heappop(f)
        if not f:
            return None
        d, v = heapq.heappop(f)
        settled[v] = d
        relaxed = 0
        for t, w in adj[v]:
            relaxed += 1
            if t not in settled:
                heapq.heappush(f, (d + w, t))
        self.relaxations += relaxed
        return v, d

    def saturate_bulk(self, graph: DocumentGraph) -> None:
        """Finish the search in one shot via the graph's distance row.

        Equivalent to settling until exhaustion: the settled map becomes
        every reachable vertex at its final distance. Each edge counts as
        relaxed once.
        """
        row = graph.dist_row(self.source)
        finite = np.nonzero(np.isfinite(row))[0]
        self.settled = {int(v): float(row[v]) for v in finite}
        self.started = True
        self.relaxations = graph.edge_count
        self.freeze(graph)

    def freeze(self, graph: DocumentGraph) -> None:
        self.frozen = True
        self.frontier = []
        d = graph.diameter
        row = np.ones(graph.vertex_count)
        if self.settled:
            ids = np.fromiter(self.settled.keys(), dtype=np.intp, count=len(self.settled))
            vals = np.fromiter(self.settled.values(), dtype=np.float64, count=len(self.settled))
            row[ids] = np.minimum(1.0, vals / d)
        row.setflags(write=False)
        self.row_norm = row

    def logical_bytes(self) -> int:
        return (len(self.settled) + len(self.frontier)) * (UNIT_ID + UNIT_WEIGHT)


class PartialScoreIndex:
    """Sorted list of optimistic completed scores for partially settled vertices.

    Entries are (score, vertex), ascending, binary-search insertion. A
    stored score is the bound computed when the entry was last touched and
    only ever understates the live bound (radii grow, optimistic legs
    resolve upward), so scanning the first C entries re-completed with
    current distances, then every entry whose stored score sits below the
    best re-completed value, finds the true minimum bound.
    """

    __slots__ = ("order", "keys", "C")

    def __init__(self, c: int = 3):
        self.order: list[tuple[float, int]] = []
        self.keys: dict[int, float] = {}
        self.C = c

    def __len__(self) -> int:
        return len(self.order)

    def insert(self, v: int, key: float) -> None:
        self.keys[v] = key
        insort(self.order, (key, v))

    def reposition(self, v: int, key: float) -> None:
        old = self.keys[v]
        if old == key:
            return
        i = bisect_left(self.order, (old, v))
        del self.order[i]
        self.keys[v] = key
        insort(self.order, (key, v))

    def remove(self, v: int) -> None:
        old = self.keys.pop(v)
        i = bisect_left(self.order, (old, v))
        del self.order[i]

    def remove_many(self, vs: set[int]) -> None:
        if not vs:
            return
        self.order = [(k, v) for k, v in self.order if v not in vs]
        for v in vs:
            self.keys.pop(v, None)

    def bulk_load(self, pairs: list[tuple[float, int]]) -> None:
        """Replace the whole index with pre-sorted (score, vertex) pairs."""
        self.order = pairs
        self.keys = {v: k for k, v in pairs}

    def vertices(self) -> list[int]:
        return [v for _, v in self.order]

    def min_bound(self, recompute) -> tuple[float, int] | None:
        """Smallest current bound and its vertex, refreshing stale heads."""
        if not self.order:
            return None
        best_val, best_v = float("inf"), -1
        seen: set[int] = set()
        for v in [v for _, v in self.order[: self.C]]:
            seen.add(v)
            val = recompute(v)
            self.reposition(v, val)
            if best_v < 0 or (val, v) < (best_val, best_v):
                best_val, best_v = val, v
        i = 0
        while i < len(self.order):
            key, v = self.order[i]
            if key >= best_val:
                break
            if v in seen:
                i += 1
                continue
            seen.add(v)
            val = recompute(v)
            if val != key:
                self.reposition(v, val)
                continue  # the list shifted around slot i; re-examine it
            if (val, v) < (best_val, best_v):
                best_val, best_v = val, v
            i += 1
        return best_val, best_v

    def logical_bytes(self) -> int:
        return len(self.order) * (UNIT_ID + UNIT_SCORE + UNIT_MASK)


class DivIterator:
    """Resumable stream of addendum vertices in best-first gain order.

    One logical owner at a time; multiple iterators over the same
    immutable graph run independently. Construction is cheap: no search
    work happens until the first emission is requested.
    """

    def __init__(
        self,
        graph: DocumentGraph,
        q: int,
        members: Sequence[int] = (),
        restriction: RestrictionSet | None = None,
        params: RankParams | None = None,
        *,
        meter=None,
        search_cache: dict[int, SourceSearch] | None = None,
        debug_bounds: bool | None = None,
        index_c: int = 3,
        bulk_threshold: int = _BULK_SETTLE_THRESHOLD,
        _reuse: dict[int, SourceSearch] | None = None,
    ):
        graph.check_vertex(q)
        members = tuple(members)
        for m in members:
            graph.check_vertex(m)
        if len(set(members)) != len(members):
            raise ValueError("duplicate members in source set")
        if q in members:
            raise ValueError("query center cannot be a set member")

        self._graph = graph
        self._q = q
        self._members = members
        self._sources: tuple[int, ...] = (q,) + members
        self._source_set = frozenset(self._sources)
        self._restriction = restriction if restriction is not None else RestrictionSet.allow_all()
        self._params = params if params is not None else RankParams()
        self._meter = meter
        self._search_cache = search_cache if search_cache is not None else {}
        if debug_bounds is None:
            debug_bounds = bool(os.environ.get(DEBUG_BOUNDS_ENV))
        self._debug_bounds = debug_bounds
        self.debug_records: list[tuple[float, tuple[int, ...], tuple[int, ...]]] = []
        self._bulk_threshold = bulk_threshold

        n_src = len(self._sources)
        self._n_sources = n_src
        self._full_mask = (1 << n_src) - 1
        self._D = graph.diameter
        self._adj = graph.adjacency()
        nv = graph.vertex_count

        self._searches: list[SourceSearch] = []
        self._relax_base: list[int] = []
        self._frozen_mask = 0
        self._legs: list[np.ndarray | None] = [None] * n_src
        self._own_legs: list[bool] = [False] * n_src
        for si, src in enumerate(self._sources):
            search = None
            if _reuse and src in _reuse:
                reused = _reuse[src]
                search = reused if reused.frozen else reused.clone()
            elif src in self._search_cache and self._search_cache[src].frozen:
                search = self._search_cache[src]
            if search is None:
                search = SourceSearch(src)
            self._searches.append(search)
            self._relax_base.append(search.relaxations)
            if search.frozen:
                self._frozen_mask |= 1 << si
                self._legs[si] = search.row_norm
        self._text_rows = [graph.text_row(src) for src in self._sources]

        self._settle_counts = [0] * n_src
        self._dyn_known = np.zeros(nv, dtype=np.uint32)
        self._state = np.zeros(nv, dtype=np.int8)
        self._discovered = 0
        self._admissible_mask = self._build_admissible_mask()
        self._admissible_total = int(self._admissible_mask.sum())

        self._score_heaps: list[list[tuple[float, int]]] = [[] for _ in self._sources]
        self._index = PartialScoreIndex(index_c)
        self._candidates: list[tuple[float, int]] = []
        self._emitted: list[int] = []
        self._emitted_set: set[int] = set()
        self._peeked: tuple[int, float] | None = None

        self._setup_constants()
        if meter is not None:
            meter.register(self)

    def _build_admissible_mask(self) -> np.ndarray:
        nv = self._graph.vertex_count
        r = self._restriction
        if r.mode is RestrictionMode.ALLOW_ALL:
            mask = np.ones(nv, dtype=bool)
        elif r.mode is RestrictionMode.WHITELIST:
            mask = np.zeros(nv, dtype=bool)
            ids = [v for v in r.members if 0 <= v < nv]
            if ids:
                mask[ids] = True
        else:
            mask = np.ones(nv, dtype=bool)
            ids = [v for v in r.members if 0 <= v < nv]
            if ids:
                mask[ids] = False
        for s in self._sources:
            mask[s] = False
        return mask

    # -- public surface ----------------------------------------------------

    @property
    def sources(self) -> tuple[int, ...]:
        return self._sources

    @property
    def emitted(self) -> tuple[int, ...]:
        return tuple(self._emitted)

    def has_next(self) -> bool:
        return len(self._emitted) < self._admissible_total

    def peek(self, budget_ms: float = 0.0) -> tuple[int, float]:
        if not self.has_next():
            raise StopIteration("iterator exhausted")
        if self._peeked is None:
            deadline = time.monotonic() + budget_ms / 1000.0 if budget_ms > 0 else None
            gain, v = self._ready_head(deadline)
            self._peeked = (v, gain)
        return self._peeked

    def next(self, budget_ms: float = 0.0) -> tuple[int, float]:
        v, gain = self.peek(budget_ms)
        self._peeked = None
        _, head = heapq.heappop(self._candidates)
        assert head == v, "candidate head changed between peek and next"
        self._state[v] = _EMITTED
        self._emitted.append(v)
        self._emitted_set.add(v)
        if self._debug_bounds:
            unseen = np.nonzero(self._admissible_mask & (self._state == _UNDISCOVERED))[0]
            self.debug_records.append(
                (gain, tuple(self._index.vertices()), tuple(int(u) for u in unseen))
            )
        if self._meter is not None:
            self._meter.checkpoint()
        return v, gain

    def __iter__(self) -> Iterator[tuple[int, float]]:
        return self

    def __next__(self) -> tuple[int, float]:
        if not self.has_next():
            raise StopIteration
        return self.next()

    def expand(self, s: int) -> "DivIterator":
        """New iterator over sources + {s}, reusing this one's search state."""
        self._graph.check_vertex(s)
        if s in self._source_set:
            raise ValueError(f"vertex {s} is already a source")
        return self._derive(self._members + (s,))

    def replace(self, out: int, in_: int) -> "DivIterator":
        """New iterator with member `out` swapped for `in_` (appended last)."""
        if out not in self._members:
            raise ValueError(f"vertex {out} is not a set member")
        self._graph.check_vertex(in_)
        if in_ in self._source_set:
            raise ValueError(f"vertex {in_} is already a source")
        new_members = tuple(m for m in self._members if m != out) + (in_,)
        return self._derive(new_members)

    def relaxations_by_source(self) -> dict[int, int]:
        return {
            src: search.relaxations - base
            for src, search, base in zip(self._sources, self._searches, self._relax_base)
        }

    @property
    def total_relaxations(self) -> int:
        return sum(self.relaxations_by_source().values())

    def logical_bytes(self) -> int:
        total = sum(s.logical_bytes() for s in self._searches)
        total += sum(len(h) for h in self._score_heaps) * (UNIT_ID + UNIT_SCORE)
        total += self._index.logical_bytes()
        total += len(self._candidates) * (UNIT_ID + UNIT_SCORE)
        total += len(self._emitted) * UNIT_ID
        total += self._discovered * (UNIT_ID + UNIT_MASK + 2 * self._n_sources * UNIT_WEIGHT)
        return total

    def release(self) -> None:
        if self._meter is not None:
            self._meter.release(self)

    # -- constants per (q, S, params) ---------------------------------------

    def _setup_constants(self) -> None:
        g, q, p = self._graph, self._q, self._params
        n = len(self._members)
        lam = p.lambda_
        self._lam = lam
        self._alpha = p.alpha
        self._beta = p.beta
        self._is_avg = p.variant is Variant.MIN_AVG
        if self._is_avg:
            self._rel_w = lam / (n + 1)
            self._diss_w = (1.0 - lam) / (n * (n + 1)) if n >= 1 else 0.0
            c = 0.0
            if n >= 1:
                rel_sum = sum(rel_distance(g, q, s, p) for s in self._members)
                c = -lam * rel_sum / (n * (n + 1))
                if n >= 2:
                    pair_sum = sum(
                        diss_distance(g, self._members[i], self._members[j], p)
                        for i in range(n)
                        for j in range(i + 1, n)
                    )
                    c += 2.0 * (1.0 - lam) * pair_sum / (n * (n * n - 1))
            self._c_const = c
        else:
            self._rel_max = max((rel_distance(g, q, s, p) for s in self._members), default=0.0)
            self._pair_min = (
                min(
                    diss_distance(g, self._members[i], self._members[j], p)
                    for i in range(n)
                    for j in range(i + 1, n)
                )
                if n >= 2
                else 0.0
            )

    # -- leg access -----------------------------------------------------------

    def _nd(self, raw: float) -> float:
        d = raw / self._D
        return d if d < 1.0 else 1.0

    def _own_leg_row(self, si: int) -> np.ndarray:
        """Writable leg column for a live source (lazy allocation)."""
        row = self._legs[si]
        if row is None or not self._own_legs[si]:
            row = np.ones(self._graph.vertex_count)
            search = self._searches[si]
            if search.settled:
                ids = np.fromiter(search.settled.keys(), dtype=np.intp, count=len(search.settled))
                vals = np.fromiter(search.settled.values(), dtype=np.float64, count=len(search.settled))
                row[ids] = np.minimum(1.0, vals / self._D)
            self._legs[si] = row
            self._own_legs[si] = True
        return row

    def _rq(self) -> float:
        s = self._searches[0]
        if s.frozen:
            return 1.0
        if not s.started:
            return 0.0
        h = s.head()
        return 1.0 if h is None else self._nd(h)

    def _known_mask(self, v: int) -> int:
        return (int(self._dyn_known[v]) | self._frozen_mask) & self._full_mask

    # -- gain and bound computation -------------------------------------------

    def _leg_value(self, si: int, v: int, known: int, optimistic_q: float | None) -> float:
        if known & (1 << si):
            return float(self._legs[si][v])
        if si == 0:
            return optimistic_q if optimistic_q is not None else 0.0
        return 1.0

    def _gain_terms(self, v: int, rq: float | None) -> float:
        """Gain with unknown legs completed optimistically.

        rq=None demands all legs known and yields the exact gain.
        """
        known = self._known_mask(v)
        lam, a, b = self._lam, self._alpha, self._beta
        gq = self._leg_value(0, v, known, rq)
        d_rel = a * gq + (1.0 - a) * float(self._text_rows[0][v])
        n = self._n_sources - 1
        if self._is_avg:
            acc = self._c_const + self._rel_w * d_rel
            dw = self._diss_w
            for si in range(1, self._n_sources):
                gi = self._leg_value(si, v, known, rq)
                acc -= dw * (b * gi + (1.0 - b) * float(self._text_rows[si][v]))
            return acc
        if n == 0:
            return lam * d_rel
        if n == 1:
            g1 = self._leg_value(1, v, known, rq)
            dd = b * g1 + (1.0 - b) * float(self._text_rows[1][v])
            return lam * max(0.0, d_rel - self._rel_max) - (1.0 - lam) * dd
        dmin = float("inf")
        for si in range(1, self._n_sources):
            gi = self._leg_value(si, v, known, rq)
            dd = b * gi + (1.0 - b) * float(self._text_rows[si][v])
            if dd < dmin:
                dmin = dd
        gain = lam * max(0.0, d_rel - self._rel_max)
        if dmin < self._pair_min:
            gain += (1.0 - lam) * (self._pair_min - dmin)
        return gain

    def _exact_gain(self, v: int) -> float:
        return self._gain_terms(v, None)

    def _bound(self, v: int, rq: float) -> float:
        return self._gain_terms(v, rq)

    def _gain_vector(self, ids: np.ndarray, rq: float | None) -> np.ndarray:
        """Vectorized _gain_terms over an id array (same optimistic rules)."""
        lam, a, b = self._lam, self._alpha, self._beta
        known = (self._dyn_known[ids].astype(np.int64) | self._frozen_mask)
        gq = np.where(
            (known & 1).astype(bool),
            self._legs[0][ids] if self._legs[0] is not None else 1.0,
            0.0 if rq is None else rq,
        )
        d_rel = a * gq + (1.0 - a) * self._text_rows[0][ids]
        n = self._n_sources - 1
        if self._is_avg:
            acc = self._c_const + self._rel_w * d_rel
            dw = self._diss_w
            for si in range(1, self._n_sources):
                has = (known & (1 << si)).astype(bool)
                gi = np.where(has, self._legs[si][ids] if self._legs[si] is not None else 1.0, 1.0)
                acc = acc - dw * (b * gi + (1.0 - b) * self._text_rows[si][ids])
            return acc
        if n == 0:
            return lam * d_rel
        dmin = np.full(len(ids), np.inf)
        for si in range(1, self._n_sources):
            has = (known & (1 << si)).astype(bool)
            gi = np.where(has, self._legs[si][ids] if self._legs[si] is not None else 1.0, 1.0)
            dd = b * gi + (1.0 - b) * self._text_rows[si][ids]
            np.minimum(dmin, dd, out=dmin)
        if n == 1:
            return lam * np.maximum(0.0, d_rel - self._rel_max) - (1.0 - lam) * dmin
        gain = lam * np.maximum(0.0, d_rel - self._rel_max)
        return gain + (1.0 - lam) * np.maximum(0.0, self._pair_min - dmin)

    def _unseen_bound(self, rq: float) -> float:
        lam, a = self._lam, self._alpha
        n = self._n_sources - 1
        if self._is_avg:
            return self._c_const + self._rel_w * a * rq - self._diss_w * n
        if n == 0:
            return lam * a * rq
        base = lam * max(0.0, a * rq - self._rel_max)
        if n == 1:
            return base - (1.0 - lam)
        return base

    def _sched_key(self, si: int, v: int) -> float:
        """Per-source partial score used to order the source's score heap."""
        lam = self._lam
        if si == 0:
            d_rel = self._alpha * float(self._legs[0][v]) + (1.0 - self._alpha) * float(
                self._text_rows[0][v]
            )
            if self._is_avg:
                return self._rel_w * d_rel
            if self._n_sources == 1:
                return lam * d_rel
            return lam * max(0.0, d_rel - self._rel_max)
        dd = self._beta * float(self._legs[si][v]) + (1.0 - self._beta) * float(
            self._text_rows[si][v]
        )
        if self._is_avg:
            return -self._diss_w * dd
        if self._n_sources - 1 == 1:
            return -(1.0 - lam) * dd
        return (1.0 - lam) * max(0.0, self._pair_min - dd)

    # -- vertex lifecycle ------------------------------------------------------

    def _discover(self, v: int) -> None:
        """First contact with an admissible non-source vertex.

        Text legs come from precomputed rows; graph legs from any live
        search that already settled v (frozen rows are always complete).
        """
        dyn = 0
        for si in range(self._n_sources):
            if self._frozen_mask & (1 << si):
                continue
            raw = self._searches[si].settled.get(v)
            if raw is not None:
                self._own_leg_row(si)[v] = self._nd(raw)
                dyn |= 1 << si
        self._dyn_known[v] = dyn
        self._discovered += 1
        if (dyn | self._frozen_mask) & self._full_mask == self._full_mask:
            self._state[v] = _CANDIDATE
            heapq.heappush(self._candidates, (self._exact_gain(v), v))
        else:
            self._state[v] = _PARTIAL
            self._index.insert(v, self._gain_terms(v, self._rq()))

    def _set_leg(self, v: int, si: int, leg: float, push_heap: bool = False) -> None:
        bit = 1 << si
        dyn = int(self._dyn_known[v])
        if (dyn | self._frozen_mask) & bit:
            return
        self._own_leg_row(si)[v] = leg
        self._dyn_known[v] = dyn | bit
        if self._state[v] != _PARTIAL:
            return
        if (dyn | bit | self._frozen_mask) & self._full_mask == self._full_mask:
            self._index.remove(v)
            self._state[v] = _CANDIDATE
            heapq.heappush(self._candidates, (self._exact_gain(v), v))
            return
        if push_heap:
            heapq.heappush(self._score_heaps[si], (self._sched_key(si, v), v))

    def _settle_one(self, si: int) -> bool:
        search = self._searches[si]
        if search.frozen:
            return False
        if not search.started:
            search.start(self._adj)
        res = search.settle_next(self._adj)
        if res is None:
            self._on_saturate(si)
            return False
        self._settle_counts[si] += 1
        v, raw = res
        if v not in self._source_set and self._admissible_mask[v]:
            if self._state[v] == _UNDISCOVERED:
                self._own_leg_row(si)[v] = self._nd(raw)
                self._dyn_known[v] |= 1 << si
                self._discover_settled(v)
            else:
                self._set_leg(v, si, self._nd(raw), push_heap=True)
        h = search.head()
        if h is None or h >= self._D:
            self._on_saturate(si)
        return True

    def _discover_settled(self, v: int) -> None:
        """Discovery path when the settling source already wrote its leg."""
        dyn = int(self._dyn_known[v])
        for si in range(self._n_sources):
            bit = 1 << si
            if (dyn | self._frozen_mask) & bit:
                continue
            raw = self._searches[si].settled.get(v)
            if raw is not None:
                self._own_leg_row(si)[v] = self._nd(raw)
                dyn |= bit
        self._dyn_known[v] = dyn
        self._discovered += 1
        if (dyn | self._frozen_mask) & self._full_mask == self._full_mask:
            self._state[v] = _CANDIDATE
            heapq.heappush(self._candidates, (self._exact_gain(v), v))
        else:
            self._state[v] = _PARTIAL
            self._index.insert(v, self._gain_terms(v, self._rq()))

    def _bulk_saturate(self, si: int) -> None:
        search = self._searches[si]
        if search.frozen:
            return
        search.saturate_bulk(self._graph)
        self._after_freeze(si)
        # bulk settling skips per-vertex discovery, which would leave
        # "unseen" vertices sitting at small final distances while the
        # unseen bound still reasons from the search radius; catch the
        # bookkeeping up so every admissible vertex is accounted for
        self._mass_discover()

    def _on_saturate(self, si: int) -> None:
        """Finalize a finished search: unsettled vertices sit at distance 1.0."""
        search = self._searches[si]
        if search.frozen:
            return
        search.started = True
        search.freeze(self._graph)
        self._after_freeze(si)

    def _after_freeze(self, si: int) -> None:
        search = self._searches[si]
        self._legs[si] = search.row_norm
        self._own_legs[si] = False
        self._frozen_mask |= 1 << si
        self._score_heaps[si] = []
        self._search_cache.setdefault(self._sources[si], search)
        self._promote_complete()
        if self._meter is not None:
            self._meter.checkpoint()

    def _promote_complete(self) -> None:
        """Move every fully known partial entry into the candidate heap."""
        if not len(self._index):
            return
        ids = np.fromiter(self._index.keys.keys(), dtype=np.intp, count=len(self._index.keys))
        known = self._dyn_known[ids].astype(np.int64) | self._frozen_mask
        done = (known & self._full_mask) == self._full_mask
        if not done.any():
            return
        done_ids = ids[done]
        gains = self._gain_vector(done_ids, None)
        self._index.remove_many({int(v) for v in done_ids})
        self._state[done_ids] = _CANDIDATE
        self._candidates.extend(zip(gains.tolist(), done_ids.tolist()))
        heapq.heapify(self._candidates)

    # -- unseen accounting -------------------------------------------------------

    def _unseen_count(self) -> int:
        return self._admissible_total - self._discovered

    def _mass_discover(self) -> None:
        """Move every unseen admissible vertex into the bookkeeping at once."""
        unseen = np.nonzero(self._admissible_mask & (self._state == _UNDISCOVERED))[0]
        if unseen.size == 0:
            return
        # pick up any settled legs from live searches
        for si in range(self._n_sources):
            if self._frozen_mask & (1 << si):
                continue
            settled = self._searches[si].settled
            if not settled:
                continue
            row = self._own_leg_row(si)
            hit = [v for v in unseen.tolist() if v in settled]
            if hit:
                ids = np.array(hit, dtype=np.intp)
                row[ids] = np.minimum(1.0, np.array([settled[int(v)] for v in hit]) / self._D)
                self._dyn_known[ids] |= np.uint32(1 << si)
        self._discovered += int(unseen.size)
        known = self._dyn_known[unseen].astype(np.int64) | self._frozen_mask
        complete = (known & self._full_mask) == self._full_mask
        comp_ids = unseen[complete]
        if comp_ids.size:
            gains = self._gain_vector(comp_ids, None)
            self._state[comp_ids] = _CANDIDATE
            self._candidates.extend(zip(gains.tolist(), comp_ids.tolist()))
            heapq.heapify(self._candidates)
        part_ids = unseen[~complete]
        if part_ids.size:
            rq = self._rq()
            bounds = self._gain_vector(part_ids, rq)
            self._state[part_ids] = _PARTIAL
            merged = self._index.order + sorted(zip(bounds.tolist(), part_ids.tolist()))
            merged.sort()
            self._index.bulk_load(merged)

    # -- main loop ------------------------------------------------------------

    def _ready_head(self, deadline: float | None) -> tuple[float, int]:
        """Advance until the candidate head is provably the next emission."""
        while True:
            if self._candidates:
                gain, v = self._candidates[0]
                blocker: int | None = None
                unseen_block = False
                rq = self._rq()
                mb = self._index.min_bound(lambda u: self._bound(u, rq)) if len(self._index) else None
                if mb is not None and gain >= mb[0]:
                    blocker = mb[1]
                elif self._unseen_count() > 0 and gain >= self._unseen_bound(rq):
                    unseen_block = True
                else:
                    return gain, v
                if deadline is not None and time.monotonic() >= deadline:
                    return gain, v  # time-out: best settled candidate right now
                if unseen_block:
                    self._resolve_unseen()
                else:
                    self._complete_vertex(blocker, _CHUNK)
            else:
                if not self._make_progress():
                    raise RuntimeError("search exhausted with emissions outstanding")

    def _complete_vertex(self, v: int, budget: int) -> None:
        if self._state[v] != _PARTIAL:
            return
        for si in range(self._n_sources):
            bit = 1 << si
            while not (self._known_mask(v) & bit):
                if self._settle_counts[si] >= self._bulk_threshold:
                    self._bulk_saturate(si)
                    break
                if budget <= 0:
                    return
                budget -= 1
                self._settle_one(si)
            if self._state[v] != _PARTIAL:
                return

    def _resolve_unseen(self) -> None:
        if not self._searches[0].frozen:
            if self._alpha * self._lam == 0.0 or self._settle_counts[0] >= self._bulk_threshold:
                # the radius term cannot raise the unseen bound; only full
                # discovery resolves the block, so finish the search now
                self._bulk_saturate(0)
            else:
                for _ in range(_CHUNK):
                    if not self._settle_one(0):
                        break
            return
        # the relevance search cannot reach further; unseen vertices keep
        # their final 1.0 leg from it, so discover them all at once
        self._mass_discover()

    def _make_progress(self) -> bool:
        best: tuple[float, int, int] | None = None
        for si, heap in enumerate(self._score_heaps):
            while heap and self._state[heap[0][1]] != _PARTIAL:
                heapq.heappop(heap)
            if heap:
                key, v = heap[0]
                if best is None or (key, v, si) < best:
                    best = (key, v, si)
        if best is not None:
            _, v, si = best
            heapq.heappop(self._score_heaps[si])
            self._complete_vertex(v, _CHUNK)
            return True
        progressed = False
        for si in range(self._n_sources):
            if not self._searches[si].frozen:
                if self._settle_counts[si] >= self._bulk_threshold:
                    self._bulk_saturate(si)
                else:
                    self._settle_one(si)
                progressed = True
        if progressed:
            return True
        return self._drain()

    def _drain(self) -> bool:
        """All searches saturated: every remaining gain is exactly computable."""
        before = len(self._candidates)
        self._promote_complete()
        self._mass_discover()
        if self._meter is not None:
            self._meter.checkpoint()
        return len(self._candidates) > before or len(self._index) > 0

    # -- derivation (expand / replace) ------------------------------------------

    def _derive(self, new_members: tuple[int, ...]) -> "DivIterator":
        reuse = {src: search for src, search in zip(self._sources, self._searches)}
        child = DivIterator(
            self._graph,
            self._q,
            new_members,
            self._restriction,
            self._params,
            meter=self._meter,
            search_cache=self._search_cache,
            debug_bounds=self._debug_bounds,
            index_c=self._index.C,
            bulk_threshold=self._bulk_threshold,
            _reuse=reuse,
        )
        # carry discovered vertices over: emitted and candidates re-enter the
        # partial index (or candidacy) of the child, pending its new sources
        carried = np.nonzero(self._state != _UNDISCOVERED)[0]
        carried = carried[child._admissible_mask[carried]]
        if carried.size == 0:
            if child._meter is not None:
                child._meter.checkpoint()
            return child
        # carry known-leg bits for retained live sources; the cloned searches
        # hold the same settled maps, so materializing the child's leg row
        # reproduces the identical values
        parent_idx = {src: pi for pi, src in enumerate(self._sources)}
        dyn = np.zeros(len(carried), dtype=np.uint32)
        for si, src in enumerate(child._sources):
            if child._frozen_mask & (1 << si):
                continue
            pi = parent_idx.get(src)
            if pi is None or (self._frozen_mask & (1 << pi)):
                continue
            bits = ((self._dyn_known[carried] >> pi) & 1).astype(np.uint32)
            if bits.any():
                child._own_leg_row(si)
                dyn |= bits << np.uint32(si)
        child._dyn_known[carried] = dyn
        child._discovered = int(carried.size)
        known = dyn.astype(np.int64) | child._frozen_mask
        complete = (known & child._full_mask) == child._full_mask
        comp_ids = carried[complete]
        if comp_ids.size:
            gains = child._gain_vector(comp_ids, None)
            child._state[comp_ids] = _CANDIDATE
            child._candidates = sorted(zip(gains.tolist(), comp_ids.tolist()))
        part_ids = carried[~complete]
        if part_ids.size:
            bounds = child._gain_vector(part_ids, child._rq())
            child._state[part_ids] = _PARTIAL
            child._index.bulk_load(sorted(zip(bounds.tolist(), part_ids.tolist())))
        if child._meter is not None:
            child._meter.checkpoint()
        return child


def verso(
    graph: DocumentGraph,
    q: int,
    members: Sequence[int],
    restriction: RestrictionSet | None = None,
    params: RankParams | None = None,
    *,
    budget_ms: float = 0.0,
    **kwargs,
) -> tuple[int, float]:
    """The admissible vertex outside {q} + members with the smallest marginal gain.

    Equivalent to building a DivIterator and taking its first emission;
    exact up to float noise, ties resolved toward the lower vertex id.
    """
    it = DivIterator(graph, q, members, restriction, params, **kwargs)
    if not it.has_next():
        raise LookupError("no admissible vertex outside the source set")
    return it.next(budget_ms)
