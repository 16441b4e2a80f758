import heapq

import numpy as np
import pytest

from diverso.corpus import Document, DocumentGraph, TermVector, build_tfidf


def make_graph(vectors, edges, diameter=None, titles=None):
    """Build a DocumentGraph from {id: {term: w}} vectors and an edge list."""
    n = len(vectors)
    docs = []
    for i in range(n):
        docs.append(
            Document(
                id=i,
                key=str(i),
                title=titles[i] if titles else f"doc {i}",
                vector=TermVector(vectors[i]),
            )
        )
    for u, v in edges:
        docs[u].out_links.append(v)
    return DocumentGraph(docs, diameter=diameter)


FIXTURE6_VECTORS = [
    {"a": 1.0},
    {"a": 1.0},
    {"b": 1.0},
    {"a": 1.0, "b": 1.0},
    {"c": 1.0},
    {"a": 1.0, "c": 1.0},
]
FIXTURE6_EDGES = [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4), (4, 5)]


@pytest.fixture
def fixture6():
    """Six vertices, unit edges 0->1, 0->2, 1->3, 2->3, 3->4, 4->5; diameter 4."""
    return make_graph(FIXTURE6_VECTORS, FIXTURE6_EDGES)


def bfs_distances(edges, n, source):
    """Unit-weight shortest paths by plain BFS; the independent oracle."""
    adj = {i: [] for i in range(n)}
    for u, v in edges:
        adj[u].append(v)
    dist = {source: 0}
    queue = [source]
    while queue:
        u = queue.pop(0)
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def random_graph(rng, max_v=200, max_deg=6, vocab=30, min_v=8, lemmas=(4, 12)):
    """Random directed graph with tf-idf vectors, for property suites."""
    n = int(rng.integers(min_v, max_v + 1))
    raw = []
    for i in range(n):
        k = int(rng.integers(lemmas[0], lemmas[1] + 1))
        toks = [f"w{int(t)}" for t in rng.integers(0, vocab, size=k)]
        raw.append((str(i), f"doc {i}", toks))
    docs = build_tfidf(raw)
    for i in range(n):
        deg = int(rng.integers(0, max_deg + 1))
        if deg and n > 1:
            targets = rng.choice(n - 1, size=min(deg, n - 1), replace=False)
            targets = [int(t) + 1 if t >= i else int(t) for t in targets]
            docs[i].out_links = sorted(set(targets))
    return DocumentGraph(docs)
