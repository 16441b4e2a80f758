"""End-to-end: generate a corpus, benchmark it, query it over HTTP.

The CSV report carries one row per (query, method, phase); score and
census columns are reproducible bit-for-bit from the seeds, only wall
times vary. The same engine serves the HTTP API the explorer UI uses.
"""

import csv
import io
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from diverso.bench import run_benchmark, write_csv
from diverso.service import create_app, resolve_query_center
from diverso.synth import SynthConfig, generate_synthetic

graph = generate_synthetic(
    SynthConfig(num_docs=1_000, links_per_doc=8, lemmas_per_doc=40, rng_seed=21)
)

records = run_benchmark(graph, queries=3, seed=4)
print(f"{len(records)} benchmark rows (3 queries x 3 method rows):")
for r in records[:6]:
    print(f"  q{r.query_id} {r.method:<16} {r.elapsed_ms:8.1f} ms  score {r.score:+.4f}")
print()

# the HTTP surface: the same graph served statelessly
client = TestClient(create_app(graph))
body = client.post("/api/diversify", json={"center_id": 17, "n": 5}).json()
print(f"POST /api/diversify center 17 -> score {body['score']:+.4f}")
for item in body["items"]:
    print(f"  [{item['id']:4d}] {item['title']:<10} rel={item['rel_distance']:.3f} "
          f"gain={item['marginal_gain']:+.4f} hops={item['hops_from_q']}")
print()

doc = client.get(f"/api/doc/{body['items'][0]['id']}").json()
print(f"GET /api/doc/{doc['id']} -> {len(doc['out_links'])} out-links, "
      f"top term {doc['top_terms'][0][0]!r}")

nb = client.get("/api/neighborhood", params={"id": 17, "hops": 2}).json()
print(f"GET /api/neighborhood?id=17&hops=2 -> {len(nb['nodes'])} nodes, {len(nb['edges'])} edges")
print()
print("to run the real server over a saved graph:")
print("  diverso generate --docs 5000 --links 10 --lemmas 100 --seed 1 --output corpus.graph")
print("  diverso serve --graph corpus.graph --bind 127.0.0.1:8000")
