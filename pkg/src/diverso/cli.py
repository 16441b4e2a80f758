"""Command line interface: ingest, stats, generate, query, bench, serve, oracle-check."""

from __future__ import annotations

import json
import sys

import click
import numpy as np

from .bench import run_benchmark
from .corpus import DocumentGraph, ingest_collection
from .engine import verso
from .oracles import oracle_best_addendum
from .ranking import RankParams, Variant
from .service import resolve_query_center, run_query, serve_http
from .synth import SynthConfig, generate_synthetic


@click.group()
def main():
    """Diversified top-k retrieval over directed document graphs."""


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--output", "output_path", required=True, type=click.Path())
def ingest(input_path, output_path):
    """Ingest a line-delimited collection and write a graph file."""
    graph = ingest_collection(input_path)
    graph.save(output_path)
    st = graph.ingest_stats
    click.echo(f"documents:       {st.documents}")
    click.echo(f"links resolved:  {st.links_resolved}")
    click.echo(f"links dropped:   {st.links_dropped}")
    click.echo(f"mean out-degree: {st.mean_out_degree:.2f}")
    click.echo(f"diameter:        {graph.diameter:g}")
    click.echo(f"written:         {output_path}")


@main.command("graph-stats")
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True))
def graph_stats(graph_path):
    """Print the shape of a saved graph."""
    g = DocumentGraph.load(graph_path)
    click.echo(f"vertices:        {g.vertex_count}")
    click.echo(f"edges:           {g.edge_count}")
    click.echo(f"mean out-degree: {g.mean_out_degree:.2f}")
    click.echo(f"diameter:        {g.diameter:g}")
    click.echo(f"empty vectors:   {len(g.empty_vector_ids)}")
    click.echo(f"checksum:        {g.checksum()[:16]}")


@main.command()
@click.option("--docs", default=10_000, show_default=True)
@click.option("--links", default=10, show_default=True)
@click.option("--lemmas", default=100, show_default=True)
@click.option("--skew", default=0.1, show_default=True)
@click.option("--vocab", default=None, type=int, help="vocabulary size (default 10 x lemmas)")
@click.option("--seed", default=0, show_default=True)
@click.option("--output", "output_path", required=True, type=click.Path())
def generate(docs, links, lemmas, skew, vocab, seed, output_path):
    """Generate a synthetic corpus graph."""
    cfg = SynthConfig(
        num_docs=docs,
        links_per_doc=links,
        lemmas_per_doc=lemmas,
        zipf_skew=skew,
        vocab_size=vocab,
        rng_seed=seed,
    )
    g = generate_synthetic(cfg)
    g.save(output_path)
    click.echo(f"generated {g.vertex_count} docs, {g.edge_count} links -> {output_path}")


@main.command()
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True))
@click.option("--q", "query", required=True, help="query text or a numeric center id")
@click.option("--n", default=10, show_default=True)
@click.option("--kg", default=2, show_default=True)
@click.option("--kc", default=2, show_default=True)
@click.option("--lambda", "lambda_", default=0.8, show_default=True)
@click.option("--alpha", default=0.0, show_default=True)
@click.option("--beta", default=0.8, show_default=True)
@click.option("--variant", type=click.Choice(["avg", "max"]), default="avg", show_default=True)
@click.option("--td-ms", default=0.0, show_default=True)
@click.option("--tc-ms", default=None, type=float)
@click.option("--json", "as_json", is_flag=True, help="print the full JSON payload")
def query(graph_path, query, n, kg, kc, lambda_, alpha, beta, variant, td_ms, tc_ms, as_json):
    """Run one diversified query against a saved graph."""
    g = DocumentGraph.load(graph_path)
    try:
        center = int(query)
        g.check_vertex(center)
    except ValueError:
        center = resolve_query_center(g, query)
    payload = run_query(g, center, n, kg, kc, lambda_, alpha, beta, variant, td_ms, tc_ms)
    if as_json:
        click.echo(json.dumps(payload, indent=2))
        return
    click.echo(f"center: [{payload['center_id']}] {g.docs[payload['center_id']].title}")
    click.echo(f"score:  {payload['score']:.6f}")
    for i, item in enumerate(payload["items"], start=1):
        hops = item["hops_from_q"]
        hops_str = "-" if hops is None else str(hops)
        click.echo(
            f"{i:3}. [{item['id']}] {item['title']}  "
            f"rel={item['rel_distance']:.4f} gain={item['marginal_gain']:+.4f} hops={hops_str}"
        )
    t = payload["timings_ms"]
    click.echo(f"greedy {t['greedy']:.1f} ms, hill-climb {t['hillclimb']:.1f} ms")


@main.command()
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True))
@click.option("--grid", "grid_path", default=None, type=click.Path(exists=True),
              help="JSON list of grid points (defaults to one default point)")
@click.option("--queries", default=100, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def bench(graph_path, grid_path, queries, seed, out_path):
    """Run the benchmark grid and write a CSV report."""
    g = DocumentGraph.load(graph_path)
    grid = None
    if grid_path:
        with open(grid_path, "r", encoding="utf-8") as f:
            grid = json.load(f)
        if not isinstance(grid, list):
            raise click.UsageError("grid file must hold a JSON list of objects")
    records = run_benchmark(g, grid, queries=queries, seed=seed, out_path=out_path)
    click.echo(f"{len(records)} rows -> {out_path}")


@main.command()
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True))
@click.option("--bind", default="127.0.0.1:8000", show_default=True)
@click.option("--frontend", "frontend_dir", default=None, type=click.Path(exists=True),
              help="directory with the built explorer (defaults to frontend/dist if present)")
def serve(graph_path, bind, frontend_dir):
    """Serve the HTTP API (and the explorer UI when built)."""
    g = DocumentGraph.load(graph_path)
    click.echo(f"serving {g.vertex_count} docs on http://{bind}")
    serve_http(g, bind, frontend_dir)


@main.command("oracle-check")
@click.option("--graph", "graph_path", default=None, type=click.Path(exists=True),
              help="check this graph (otherwise random graphs are generated per trial)")
@click.option("--trials", default=50, show_default=True)
@click.option("--max-v", default=200, show_default=True)
@click.option("--seed", default=0, show_default=True)
def oracle_check(graph_path, trials, max_v, seed):
    """Exactness audit: verso against the brute-force oracle; exits nonzero on mismatch."""
    rng = np.random.default_rng(seed)
    fixed = DocumentGraph.load(graph_path) if graph_path else None
    if fixed is not None and fixed.vertex_count > max_v:
        raise click.UsageError(f"graph has {fixed.vertex_count} vertices, above --max-v {max_v}")
    grid = [0.2, 0.5, 0.8]
    failures = 0
    for t in range(trials):
        if fixed is not None:
            g = fixed
        else:
            g = _random_trial_graph(rng, max_v)
        q = int(rng.integers(0, g.vertex_count))
        others = [v for v in range(g.vertex_count) if v != q]
        ns = int(rng.integers(0, min(4, len(others))))
        members = tuple(int(x) for x in rng.choice(others, size=ns, replace=False))
        params = RankParams(
            lambda_=float(rng.choice(grid)),
            alpha=float(rng.choice(grid)),
            beta=float(rng.choice(grid)),
            variant=Variant.MIN_AVG if t % 2 else Variant.MIN_MAX,
        )
        v, gain = verso(g, q, members, params=params)
        ov, og = oracle_best_addendum(g, q, members, params=params)
        if v != ov and abs(gain - og) > 1e-9:
            failures += 1
            click.echo(f"MISMATCH trial {t}: verso=({v}, {gain:.12f}) oracle=({ov}, {og:.12f})")
    click.echo(f"{trials} trials, {failures} mismatches")
    if failures:
        sys.exit(1)


def _random_trial_graph(rng, max_v):
    cfg = SynthConfig(
        num_docs=int(rng.integers(20, max_v + 1)),
        links_per_doc=int(rng.integers(2, 7)),
        lemmas_per_doc=8,
        vocab_size=30,
        zipf_skew=0.1,
        rng_seed=int(rng.integers(0, 2**63 - 1)),
    )
    return generate_synthetic(cfg)


if __name__ == "__main__":
    main()
