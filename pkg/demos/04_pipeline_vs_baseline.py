"""Greedy + hill-climbing pipeline against the hop-capped baseline.

The pipeline seeds k_g greedy sets from the most relevant vertices,
refines them by swapping members for streamed optimal replacements, and
returns the best set found. The baseline greedily picks from a pool
limited to ell hops around the current result, which is exactly its
weakness: nothing beyond the cap is ever examined.
"""

import time

import numpy as np

from diverso.baseline import BaselineParams, best_coverage
from diverso.pipeline import PipelineConfig, diversify_with_metrics
from diverso.ranking import RankParams, Variant
from diverso.synth import SynthConfig, generate_synthetic

graph = generate_synthetic(
    SynthConfig(num_docs=5_000, links_per_doc=10, lemmas_per_doc=80, rng_seed=11)
)
params = RankParams(lambda_=0.8, alpha=0.0, beta=0.8, variant=Variant.MIN_AVG)
config = PipelineConfig(n=10, k_g=2, k_c=2)
bp = BaselineParams(ell=2, params=params)

rng = np.random.default_rng(0)
centers = rng.choice(graph.vertex_count, size=5, replace=False)

print(f"{'center':>8} {'pipeline':>10} {'coverage':>10} {'pipe ms':>8} {'cov ms':>8}")
for center in centers:
    center = int(center)
    t0 = time.monotonic()
    best, phases = diversify_with_metrics(graph, center, 10, None, config, params)
    t_pipe = (time.monotonic() - t0) * 1000
    t0 = time.monotonic()
    cov = best_coverage(graph, center, 10, bp=bp)
    t_cov = (time.monotonic() - t0) * 1000
    print(f"{center:>8} {best.score:>10.4f} {cov.score:>10.4f} {t_pipe:>8.0f} {t_cov:>8.0f}")

print()
print("per-phase census for the last query:")
for name, pm in phases.items():
    print(f"  {name}: {pm.elapsed_ms:.0f} ms, peak {pm.logical_bytes_peak} logical bytes, score {pm.score:+.4f}")
print()
print("the hill-climb score never exceeds the greedy score (the seeds are")
print("pre-seeded into the candidate pool), and both usually beat coverage")
