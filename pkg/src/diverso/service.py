"""HTTP API over a loaded graph, plus query-center resolution.

Stateless request handling over one shared immutable DocumentGraph. All
bodies are JSON; errors carry machine-readable codes. When a built
explorer frontend is present next to the package it is served at /.
"""

from __future__ import annotations

from collections import deque
from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel, Field

from .corpus import DocumentGraph, RestrictionSet, TermVector
from .pipeline import PipelineConfig, diversify_with_metrics
from .ranking import RankParams, Variant, rel_distance

NEIGHBORHOOD_NODE_CAP = 200


class DiversifyRequest(BaseModel):
    """Body of POST /api/diversify; field names match the wire format."""

    query: Optional[str] = None
    center_id: Optional[int] = None
    n: int = 10
    kg: int = 2
    kc: int = 2
    lambda_: float = Field(0.8, alias="lambda")
    alpha: float = 0.0
    beta: float = 0.8
    variant: str = "avg"
    td_ms: float = 0.0
    tc_ms: Optional[float] = None

    model_config = {"populate_by_name": True}


def resolve_query_center(graph: DocumentGraph, text: str) -> int:
    """Best-matching document for a free-text query.

    Ranks by 2 x title-token Jaccard overlap plus the cosine similarity of
    the query tokens against the document vector; ties resolve to the
    lower id. Documents with empty vectors are excluded. Raises
    LookupError when nothing overlaps at all.
    """
    tokens = [t for t in text.lower().split() if t]
    if not tokens:
        raise ValueError("empty query")
    qset = set(tokens)
    qvec = TermVector({t: float(tokens.count(t)) for t in qset})

    best_id, best_score = -1, 0.0
    for doc in graph.docs:
        if doc.id in graph.empty_vector_ids:
            continue
        title_tokens = set(doc.title.lower().split())
        union = qset | title_tokens
        overlap = len(qset & title_tokens) / len(union) if union else 0.0
        cos = 0.0
        if doc.vector:
            dot = qvec.dot(doc.vector)
            if dot > 0.0:
                cos = dot / (qvec.norm * doc.vector.norm)
        score = 2.0 * overlap + cos
        if score > best_score:
            best_id, best_score = doc.id, score
    if best_id < 0:
        raise LookupError(f"no document matches query {text!r}")
    return best_id


def hops_from(graph: DocumentGraph, source: int, limit: int | None = None) -> dict[int, int]:
    """Unweighted out-link hop counts from `source` (BFS)."""
    adj = graph.adjacency()
    hops = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        if limit is not None and hops[u] >= limit:
            continue
        for v, _w in adj[u]:
            if v not in hops:
                hops[v] = hops[u] + 1
                queue.append(v)
    return hops


def neighborhood(graph: DocumentGraph, center: int, hops: int) -> dict[str, Any]:
    """Induced subgraph of the closest vertices for rendering (<= 200 nodes)."""
    graph.check_vertex(center)
    adj = graph.adjacency()
    dist = {center: 0}
    order = [center]
    queue = deque([center])
    while queue and len(order) < NEIGHBORHOOD_NODE_CAP:
        u = queue.popleft()
        if dist[u] >= hops:
            continue
        for v, _w in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                order.append(v)
                queue.append(v)
                if len(order) >= NEIGHBORHOOD_NODE_CAP:
                    break
    chosen = set(order)
    nodes = [
        {"id": v, "title": graph.docs[v].title, "hops": dist[v]} for v in order
    ]
    edges = [
        {"source": u, "target": t}
        for u in order
        for t in graph.docs[u].out_links
        if t in chosen
    ]
    return {"nodes": nodes, "edges": edges}


def run_query(
    graph: DocumentGraph,
    center: int,
    n: int,
    kg: int,
    kc: int,
    lambda_: float,
    alpha: float,
    beta: float,
    variant: str,
    td_ms: float = 0.0,
    tc_ms: float | None = None,
) -> dict[str, Any]:
    """Shared query path for the CLI and the HTTP endpoint."""
    params = RankParams(lambda_=lambda_, alpha=alpha, beta=beta, variant=Variant.parse(variant))
    config = PipelineConfig(n=n, k_g=kg, k_c=kc, t_d_ms=td_ms, t_c_ms=tc_ms)
    best, phases = diversify_with_metrics(graph, center, n, None, config, params)
    hop_map = hops_from(graph, center)
    items = []
    for rank, v in enumerate(best.items):
        items.append(
            {
                "id": v,
                "title": graph.docs[v].title,
                "rel_distance": rel_distance(graph, center, v, params),
                "marginal_gain": _replayed_gain(graph, center, best.items, rank, params),
                "hops_from_q": hop_map.get(v),
            }
        )
    return {
        "center_id": center,
        "items": items,
        "score": best.score,
        "timings_ms": {
            "greedy": phases["greedy"].elapsed_ms,
            "hillclimb": phases["hillclimb"].elapsed_ms,
        },
        "logical_bytes_peak": {
            "greedy": phases["greedy"].logical_bytes_peak,
            "hillclimb": phases["hillclimb"].logical_bytes_peak,
        },
        "params": {
            "n": n,
            "kg": kg,
            "kc": kc,
            "lambda": lambda_,
            "alpha": alpha,
            "beta": beta,
            "variant": Variant.parse(variant).value,
        },
    }


def _replayed_gain(graph, center, items, rank, params):
    from .ranking import marginal_gain

    return marginal_gain(graph, center, list(items[:rank]), items[rank], params)


def create_app(graph: DocumentGraph, frontend_dir: str | None = None):
    """FastAPI application bound to one immutable graph."""
    from fastapi import FastAPI
    from fastapi.responses import JSONResponse

    app = FastAPI(title="diverso", docs_url=None, redoc_url=None)

    def error(status: int, code: str, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"error": {"code": code, "message": message}})

    @app.get("/api/health")
    def health():
        return {"status": "ok", "vertex_count": graph.vertex_count, "edge_count": graph.edge_count}

    @app.post("/api/diversify")
    def diversify_endpoint(req: DiversifyRequest):
        if req.center_id is None and not req.query:
            return error(400, "NO_CENTER", "provide either 'query' or 'center_id'")
        if req.center_id is not None:
            if req.center_id not in graph:
                return error(404, "DOC_NOT_FOUND", f"no document with id {req.center_id}")
            center = req.center_id
        else:
            try:
                center = resolve_query_center(graph, req.query)
            except LookupError:
                return error(404, "QUERY_UNRESOLVED", f"no matching center for {req.query!r}")
            except ValueError:
                return error(400, "EMPTY_QUERY", "query text is empty")
        try:
            return run_query(
                graph, center, req.n, req.kg, req.kc,
                req.lambda_, req.alpha, req.beta, req.variant,
                req.td_ms, req.tc_ms,
            )
        except ValueError as e:
            return error(400, "BAD_PARAMS", str(e))

    @app.get("/api/doc/{doc_id}")
    def doc_endpoint(doc_id: int):
        if doc_id not in graph:
            return error(404, "DOC_NOT_FOUND", f"no document with id {doc_id}")
        d = graph.docs[doc_id]
        top_terms = sorted(d.vector.entries.items(), key=lambda kv: (-kv[1], kv[0]))[:10]
        return {
            "id": d.id,
            "key": d.key,
            "title": d.title,
            "out_links": d.out_links,
            "top_terms": [[t, w] for t, w in top_terms],
        }

    @app.get("/api/neighborhood")
    def neighborhood_endpoint(id: int, hops: int = 2):
        if id not in graph:
            return error(404, "DOC_NOT_FOUND", f"no document with id {id}")
        if hops < 0:
            return error(400, "BAD_PARAMS", "hops must be >= 0")
        return neighborhood(graph, id, hops)

    if frontend_dir is None:
        default_dist = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        if default_dist.is_dir():
            frontend_dir = str(default_dist)
    if frontend_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="explorer")

    return app


def serve_http(graph: DocumentGraph, bind: str = "127.0.0.1:8000", frontend_dir: str | None = None) -> None:
    """Run the service until interrupted."""
    import uvicorn

    host, _, port = bind.partition(":")
    uvicorn.run(create_app(graph, frontend_dir), host=host or "127.0.0.1", port=int(port or 8000))
