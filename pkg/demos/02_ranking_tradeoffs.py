"""How the trade-off parameters reshape a result set's score.

lambda weighs relevance against pairwise dissimilarity, alpha mixes graph
vs text distance inside relevance, beta does the same inside
dissimilarity. Lower scores are better; the dissimilarity term enters
negatively, so spreading the set out pays.
"""

import numpy as np

from diverso import RankParams, Variant, marginal_gain, score_of
from diverso.synth import SynthConfig, generate_synthetic

graph = generate_synthetic(
    SynthConfig(num_docs=300, links_per_doc=6, lemmas_per_doc=25, rng_seed=7)
)
q = 42
tight = (3, 17, 29)    # arbitrary small ids, probably interlinked
print(f"scoring the ordered set {tight} for query center {q}\n")

print("lambda sweep (alpha=0, beta=0.8, min-avg):")
for lam in (0.2, 0.5, 0.8, 1.0):
    p = RankParams(lambda_=lam, alpha=0.0, beta=0.8, variant=Variant.MIN_AVG)
    print(f"  lambda={lam:.1f}: score = {score_of(graph, q, tight, p):+.4f}")
print()

print("beta sweep (lambda=0.8, alpha=0):")
for beta in (0.0, 0.4, 0.8, 1.0):
    p = RankParams(lambda_=0.8, alpha=0.0, beta=beta, variant=Variant.MIN_AVG)
    print(f"  beta={beta:.1f}: score = {score_of(graph, q, tight, p):+.4f}")
print()

# the two variants judge the same set differently: min-avg averages
# everything, min-max only sees the worst relevance and the closest pair
for variant in Variant:
    p = RankParams(lambda_=0.8, alpha=0.0, beta=0.8, variant=variant)
    print(f"{variant.name}: score = {score_of(graph, q, tight, p):+.4f}")
print()

# marginal gain = how the score moves when one vertex joins the set
p = RankParams(lambda_=0.8, alpha=0.0, beta=0.8, variant=Variant.MIN_AVG)
gains = [(marginal_gain(graph, q, tight, u, p), u) for u in range(60) if u != q and u not in tight]
gains.sort()
print("five best additions to the set (gain, vertex):")
for g, u in gains[:5]:
    print(f"  {g:+.4f}  vertex {u}")
