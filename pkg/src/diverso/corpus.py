"""Document collection model.

Owns the directed link graph, the sparse term vectors attached to every
document, ingestion of line-delimited collections, tf-idf construction and
the two primitive distances (text and normalized graph distance) that the
ranking and search layers consume.
"""

from __future__ import annotations

import json
import math
import threading
import warnings
from collections import OrderedDict
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

GRAPH_MAGIC = "diverso-graph"
GRAPH_VERSION = 1

DIAMETER_EXACT_THRESHOLD = 2000
DIAMETER_SWEEP_SAMPLES = 16

_DIST_ROW_CACHE_SIZE = 256


class CorpusError(ValueError):
    """Malformed collection input (bad line, duplicate id, empty corpus)."""


class EmptyVectorError(ValueError):
    """Cosine distance requested against an empty term vector."""


class VertexNotFoundError(KeyError):
    """Vertex id outside the graph."""


class TermVector:
    """Sparse non-negative term-weight vector.

    Entries with weight <= 0 are dropped at construction so the stored
    mapping only ever holds strictly positive weights.
    """

    __slots__ = ("entries", "_norm")

    def __init__(self, entries: dict[str, float] | None = None):
        clean: dict[str, float] = {}
        if entries:
            for term, weight in entries.items():
                w = float(weight)
                if w < 0.0:
                    raise ValueError(f"negative weight for term {term!r}: {w}")
                if w > 0.0:
                    clean[term] = w
        self.entries = clean
        self._norm: float | None = None

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, TermVector) and self.entries == other.entries

    def __repr__(self) -> str:
        return f"TermVector({self.entries!r})"

    @property
    def norm(self) -> float:
        if self._norm is None:
            self._norm = math.sqrt(sum(w * w for w in self.entries.values()))
        return self._norm

    def dot(self, other: "TermVector") -> float:
        a, b = self.entries, other.entries
        if len(b) < len(a):
            a, b = b, a
        return sum(w * b[t] for t, w in a.items() if t in b)


def text_distance(u: TermVector, v: TermVector) -> float:
    """Cosine distance 1 - <u.v>/(|u||v|), clamped to [0, 1].

    Raises EmptyVectorError for empty vectors: the cosine is undefined
    without at least one weighted term on each side.
    """
    if not u or not v:
        raise EmptyVectorError("undefined cosine: empty term vector")
    d = 1.0 - u.dot(v) / (u.norm * v.norm)
    if d < 0.0:
        return 0.0
    if d > 1.0:
        return 1.0
    return d


@dataclass
class Document:
    """A vertex plus its textual context.

    `id` is the dense integer vertex identifier assigned in ingestion
    order; `key` keeps the external string id for serialization.
    """

    id: int
    key: str
    title: str
    vector: TermVector
    out_links: list[int] = field(default_factory=list)


class RestrictionMode(Enum):
    ALLOW_ALL = "allow_all"
    WHITELIST = "whitelist"
    BLACKLIST = "blacklist"


@dataclass(frozen=True)
class RestrictionSet:
    """Whitelist/blacklist filter on which vertices may appear in results.

    The filter never removes vertices from the graph: excluded documents
    still conduct paths, they just cannot be emitted.
    """

    mode: RestrictionMode = RestrictionMode.ALLOW_ALL
    members: frozenset[int] = frozenset()

    @classmethod
    def allow_all(cls) -> "RestrictionSet":
        return cls(RestrictionMode.ALLOW_ALL, frozenset())

    @classmethod
    def whitelist(cls, ids: Iterable[int]) -> "RestrictionSet":
        return cls(RestrictionMode.WHITELIST, frozenset(ids))

    @classmethod
    def blacklist(cls, ids: Iterable[int]) -> "RestrictionSet":
        return cls(RestrictionMode.BLACKLIST, frozenset(ids))

    def admits(self, v: int) -> bool:
        if self.mode is RestrictionMode.ALLOW_ALL:
            return True
        if self.mode is RestrictionMode.WHITELIST:
            return v in self.members
        return v not in self.members

    def admissible_count(self, graph: "DocumentGraph", exclude: Sequence[int] = ()) -> int:
        """Number of admissible vertices outside `exclude`."""
        n = graph.vertex_count
        excl = [v for v in set(exclude) if 0 <= v < n]
        if self.mode is RestrictionMode.ALLOW_ALL:
            return n - len(excl)
        if self.mode is RestrictionMode.WHITELIST:
            valid = {v for v in self.members if 0 <= v < n}
            return len(valid - set(excl))
        blocked = {v for v in self.members if 0 <= v < n}
        return n - len(blocked | set(excl))


@dataclass
class IngestStats:
    documents: int
    links_resolved: int
    links_dropped: int
    mean_out_degree: float


class DocumentGraph:
    """Immutable directed graph of documents.

    Edge weights default to 1.0 per link ("clicks"); a per-edge weight map
    can be supplied for generality. `diameter` is the positive normalizer
    that maps raw path weights into [0, 1]. The object is safe to share
    across concurrent queries once constructed.
    """

    def __init__(
        self,
        docs: list[Document],
        diameter: float | None = None,
        edge_weights: dict[tuple[int, int], float] | None = None,
    ):
        n = len(docs)
        for d in docs:
            for t in d.out_links:
                if not (0 <= t < n):
                    raise VertexNotFoundError(f"link target {t} out of range in doc {d.id}")
        self.docs = docs
        self.edge_weights = dict(edge_weights) if edge_weights else {}
        for w in self.edge_weights.values():
            if w <= 0:
                raise ValueError("edge weights must be positive")
        self._adjacency: tuple[tuple[tuple[int, float], ...], ...] | None = None
        self._csr = None
        self._dist_rows: OrderedDict[int, np.ndarray] = OrderedDict()
        self._term_matrix = None
        self._text_rows: OrderedDict[int, np.ndarray] = OrderedDict()
        self._cache_lock = threading.Lock()  # guards the two row caches
        self.empty_vector_ids = frozenset(d.id for d in docs if not d.vector)
        self.ingest_stats: IngestStats | None = None
        if diameter is not None:
            if diameter <= 0:
                raise ValueError("diameter must be positive")
            self.diameter = float(diameter)
        else:
            self.diameter = compute_diameter(self)

    # -- basic shape ------------------------------------------------------

    @property
    def vertex_count(self) -> int:
        return len(self.docs)

    @property
    def edge_count(self) -> int:
        return sum(len(d.out_links) for d in self.docs)

    @property
    def mean_out_degree(self) -> float:
        n = self.vertex_count
        return self.edge_count / n if n else 0.0

    def __contains__(self, v: int) -> bool:
        return 0 <= v < len(self.docs)

    def check_vertex(self, v: int) -> None:
        if not (isinstance(v, (int, np.integer)) and 0 <= v < len(self.docs)):
            raise VertexNotFoundError(f"unknown vertex id {v!r}")

    def edge_weight(self, u: int, v: int) -> float:
        return self.edge_weights.get((u, v), 1.0)

    def adjacency(self) -> tuple[tuple[tuple[int, float], ...], ...]:
        """Per-vertex (target, weight) tuples, built once and cached."""
        if self._adjacency is None:
            self._adjacency = tuple(
                tuple((t, self.edge_weight(d.id, t)) for t in d.out_links)
                for d in self.docs
            )
        return self._adjacency

    # -- shortest paths ---------------------------------------------------

    def _graph_csr(self):
        if self._csr is None:
            rows, cols, data = [], [], []
            for d in self.docs:
                for t in d.out_links:
                    rows.append(d.id)
                    cols.append(t)
                    data.append(self.edge_weight(d.id, t))
            n = self.vertex_count
            self._csr = csr_matrix((data, (rows, cols)), shape=(n, n))
        return self._csr

    def dist_row(self, u: int) -> np.ndarray:
        """Raw shortest-path weights from u to every vertex (inf = unreachable)."""
        self.check_vertex(u)
        with self._cache_lock:
            row = self._dist_rows.get(u)
            if row is not None:
                self._dist_rows.move_to_end(u)
                return row
        row = _csgraph_dijkstra(self._graph_csr(), directed=True, indices=u)
        row.setflags(write=False)
        with self._cache_lock:
            if len(self._dist_rows) >= _DIST_ROW_CACHE_SIZE:
                self._dist_rows.popitem(last=False)
            self._dist_rows[u] = row
        return row

    # -- text distances ----------------------------------------------------

    def _norm_term_matrix(self):
        """Row-normalized doc x term CSR matrix for vectorized cosines."""
        if self._term_matrix is None:
            term_ids: dict[str, int] = {}
            rows, cols, data = [], [], []
            for d in self.docs:
                vec = d.vector
                if not vec:
                    continue
                inv = 1.0 / vec.norm
                for t, w in vec.entries.items():
                    c = term_ids.setdefault(t, len(term_ids))
                    rows.append(d.id)
                    cols.append(c)
                    data.append(w * inv)
            self._term_matrix = csr_matrix(
                (data, (rows, cols)), shape=(self.vertex_count, max(len(term_ids), 1))
            )
        return self._term_matrix

    def text_row(self, u: int) -> np.ndarray:
        """Cosine distances from u to every document, as one read-only row.

        Empty vectors on either side map to distance 1.0 (the same
        convention the ranking layer applies); d(u, u) is 0 for any
        document with a non-empty vector.
        """
        self.check_vertex(u)
        with self._cache_lock:
            row = self._text_rows.get(u)
            if row is not None:
                self._text_rows.move_to_end(u)
                return row
        n = self.vertex_count
        if u in self.empty_vector_ids:
            row = np.ones(n)
            row[u] = 0.0
        else:
            m = self._norm_term_matrix()
            sims = np.asarray((m @ m[u].T).todense()).ravel()
            row = 1.0 - sims
            np.clip(row, 0.0, 1.0, out=row)
            if self.empty_vector_ids:
                row[list(self.empty_vector_ids)] = 1.0
            row[u] = 0.0
        row.setflags(write=False)
        with self._cache_lock:
            if len(self._text_rows) >= _DIST_ROW_CACHE_SIZE:
                self._text_rows.popitem(last=False)
            self._text_rows[u] = row
        return row

    # -- integrity --------------------------------------------------------

    def checksum(self) -> str:
        import hashlib

        h = hashlib.sha256()
        h.update(f"{self.diameter:.12g}".encode())
        for d in self.docs:
            h.update(d.key.encode())
            h.update(d.title.encode())
            for t in sorted(d.vector.entries):
                h.update(f"{t}={d.vector.entries[t]:.12g}".encode())
            h.update(bytes(str(d.out_links), "utf-8"))
        return h.hexdigest()

    # -- serialization ----------------------------------------------------

    def save(self, path: str) -> None:
        """Write the versioned graph file (header line + one doc per line)."""
        header = {
            "magic": GRAPH_MAGIC,
            "version": GRAPH_VERSION,
            "diameter": self.diameter,
            "vertex_count": self.vertex_count,
            "edge_count": self.edge_count,
        }
        with open(path, "w", encoding="utf-8") as f:
            f.write(json.dumps(header) + "\n")
            for d in self.docs:
                rec = {
                    "id": d.key,
                    "title": d.title,
                    "tfidf": d.vector.entries,
                    "links": [self.docs[t].key for t in d.out_links],
                }
                f.write(json.dumps(rec) + "\n")

    @classmethod
    def load(cls, path: str) -> "DocumentGraph":
        with open(path, "r", encoding="utf-8") as f:
            first = f.readline()
        try:
            header = json.loads(first)
        except json.JSONDecodeError as e:
            raise CorpusError(f"not a graph file (bad header): {e}") from e
        if not isinstance(header, dict) or header.get("magic") != GRAPH_MAGIC:
            raise CorpusError("not a graph file (missing magic header)")
        if header.get("version") != GRAPH_VERSION:
            raise CorpusError(f"unsupported graph file version {header.get('version')!r}")
        graph = ingest_collection(path, diameter=float(header["diameter"]))
        return graph


def graph_distance(g: DocumentGraph, u: int, v: int) -> float:
    """Normalized directed graph distance in [0, 1].

    min(1, shortest-path weight / diameter); unreachable pairs map to 1.0
    (maximally distant) and d(u, u) = 0.
    """
    g.check_vertex(u)
    g.check_vertex(v)
    if u == v:
        return 0.0
    d = g.dist_row(u)[v]
    if not np.isfinite(d):
        return 1.0
    return min(1.0, float(d) / g.diameter)


def compute_diameter(
    g: DocumentGraph,
    exact_threshold: int = DIAMETER_EXACT_THRESHOLD,
    samples: int = DIAMETER_SWEEP_SAMPLES,
) -> float:
    """Maximum finite shortest-path weight, exact below `exact_threshold`.

    Larger graphs fall back to repeated double sweeps from `samples`
    spread-out sources; the estimate is never below any distance observed
    during the sweeps. Graphs with no finite directed path default to 1.0
    with a warning.
    """
    n = g.vertex_count
    if n == 0:
        warnings.warn("empty graph: diameter defaults to 1.0")
        return 1.0
    csr = g._graph_csr()
    if csr.nnz == 0:
        warnings.warn("graph has no finite directed path: diameter defaults to 1.0")
        return 1.0

    def _max_finite(mat: np.ndarray) -> float:
        finite = mat[np.isfinite(mat)]
        positive = finite[finite > 0]
        return float(positive.max()) if positive.size else 0.0

    best = 0.0
    if n <= exact_threshold:
        dist = _csgraph_dijkstra(csr, directed=True)
        best = _max_finite(dist)
    else:
        step = max(1, n // samples)
        for s in range(0, n, step):
            row = _csgraph_dijkstra(csr, directed=True, indices=s)
            m = _max_finite(row)
            best = max(best, m)
            if m > 0:
                far = int(np.nanargmax(np.where(np.isfinite(row), row, -1.0)))
                row2 = _csgraph_dijkstra(csr, directed=True, indices=far)
                best = max(best, _max_finite(row2))
    if best <= 0.0:
        warnings.warn("graph has no finite directed path: diameter defaults to 1.0")
        return 1.0
    return best


def build_tfidf(raw: Iterable[tuple[str, str, list[str]]]) -> list[Document]:
    """Turn (id, title, token list) records into Documents with tf-idf vectors.

    weight(term, doc) = tf(term, doc) * ln(N / df(term)); terms present in
    every document get weight 0 and are not stored. Documents whose vector
    ends up empty are kept (with a warning) but are excluded as query
    centers downstream.
    """
    records = list(raw)
    if not records:
        raise CorpusError("empty corpus")
    n_docs = len(records)
    df: dict[str, int] = {}
    tfs: list[dict[str, int]] = []
    for _, _, tokens in records:
        tf: dict[str, int] = {}
        for tok in tokens:
            tf[tok] = tf.get(tok, 0) + 1
        tfs.append(tf)
        for term in tf:
            df[term] = df.get(term, 0) + 1

    docs: list[Document] = []
    empty = 0
    for i, ((key, title, _), tf) in enumerate(zip(records, tfs)):
        weights = {}
        for term, count in tf.items():
            d = df[term]
            if d >= n_docs:
                continue
            weights[term] = count * math.log(n_docs / d)
        vec = TermVector(weights)
        if not vec:
            empty += 1
        docs.append(Document(id=i, key=str(key), title=title, vector=vec))
    if empty:
        warnings.warn(
            f"{empty} document(s) have empty tf-idf vectors; they are retained "
            "but excluded as query centers"
        )
    return docs


def ingest_collection(path: str, diameter: float | None = None) -> DocumentGraph:
    """Read a line-delimited collection into a DocumentGraph.

    Each line is a JSON record with fields `id`, `title`, either `tokens`
    or `tfidf`, and `links`. Unresolved link targets are dropped; duplicate
    links and self-links are removed. A graph-file header line (magic
    record) is skipped, which makes re-ingesting serialized output valid.
    """
    raw_records: list[tuple[str, str, dict]] = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise CorpusError(f"line {lineno}: malformed JSON ({e.msg})") from e
            if not isinstance(rec, dict):
                raise CorpusError(f"line {lineno}: record must be an object")
            if "magic" in rec and "id" not in rec:
                if lineno == 1:
                    continue  # graph-file header
                raise CorpusError(f"line {lineno}: unexpected header record")
            if "id" not in rec:
                raise CorpusError(f"line {lineno}: missing field 'id'")
            raw_records.append((str(rec["id"]), str(rec.get("title", "")), rec))

    if not raw_records:
        raise CorpusError("empty corpus")

    seen_keys: set[str] = set()
    for key, _, _ in raw_records:
        if key in seen_keys:
            raise CorpusError(f"duplicate document id {key!r}")
        seen_keys.add(key)

    has_tokens = any("tokens" in rec for _, _, rec in raw_records)
    has_tfidf = any("tfidf" in rec for _, _, rec in raw_records)
    if has_tokens and has_tfidf:
        raise CorpusError("mixed 'tokens' and 'tfidf' records in one collection")
    if not has_tokens and not has_tfidf:
        raise CorpusError("records need either 'tokens' or 'tfidf'")

    if has_tokens:
        docs = build_tfidf((key, title, list(rec.get("tokens", []))) for key, title, rec in raw_records)
    else:
        docs = []
        empty = 0
        for i, (key, title, rec) in enumerate(raw_records):
            vec = TermVector({str(t): float(w) for t, w in rec.get("tfidf", {}).items()})
            if not vec:
                empty += 1
            docs.append(Document(id=i, key=key, title=title, vector=vec))
        if empty:
            warnings.warn(
                f"{empty} document(s) have empty tf-idf vectors; they are retained "
                "but excluded as query centers"
            )

    key_to_id = {d.key: d.id for d in docs}
    dropped = 0
    resolved = 0
    for d, (_, _, rec) in zip(docs, raw_records):
        links = rec.get("links", [])
        seen_targets: set[int] = set()
        out: list[int] = []
        for target in links:
            tid = key_to_id.get(str(target))
            if tid is None:
                dropped += 1
                continue
            if tid == d.id or tid in seen_targets:
                continue
            seen_targets.add(tid)
            out.append(tid)
        resolved += len(out)
        d.out_links = out

    graph = DocumentGraph(docs, diameter=diameter)
    graph.ingest_stats = IngestStats(
        documents=len(docs),
        links_resolved=resolved,
        links_dropped=dropped,
        mean_out_degree=graph.mean_out_degree,
    )
    return graph
