"""Synthetic workload generation.

Random directed graphs with a fixed number of distinct out-links per
document (no self-loops, no duplicates) and zipfian lemma draws over a
synthetic vocabulary, reproducible from a 64-bit seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Document, DocumentGraph, build_tfidf


@dataclass(frozen=True)
class SynthConfig:
    """Knobs of the generator; vocab defaults to 10 x lemmas_per_doc."""

    num_docs: int = 10_000
    links_per_doc: int = 10
    lemmas_per_doc: int = 100
    zipf_skew: float = 0.1
    vocab_size: int | None = None
    rng_seed: int = 0

    def __post_init__(self):
        if self.num_docs < 1 or self.links_per_doc < 1 or self.lemmas_per_doc < 1:
            raise ValueError("num_docs, links_per_doc and lemmas_per_doc must be >= 1")
        if self.zipf_skew < 0:
            raise ValueError("zipf_skew must be >= 0")
        if self.vocab_size is None:
            object.__setattr__(self, "vocab_size", 10 * self.lemmas_per_doc)
        if self.vocab_size < 1:
            raise ValueError("vocab_size must be >= 1")


def generate_synthetic(cfg: SynthConfig) -> DocumentGraph:
    """Exactly num_docs vertices and num_docs * links_per_doc distinct edges.

    Lemma ranks follow the power law P(r) proportional to r^(-skew);
    skew 0 degenerates to uniform draws.
    """
    if cfg.links_per_doc >= cfg.num_docs:
        raise ValueError(
            f"links_per_doc ({cfg.links_per_doc}) must be below num_docs ({cfg.num_docs})"
        )
    rng = np.random.default_rng(cfg.rng_seed)

    ranks = np.arange(1, cfg.vocab_size + 1, dtype=np.float64)
    probs = ranks ** (-cfg.zipf_skew)
    probs /= probs.sum()

    raw = []
    for i in range(cfg.num_docs):
        draws = rng.choice(cfg.vocab_size, size=cfg.lemmas_per_doc, p=probs)
        tokens = [f"w{int(t)}" for t in draws]
        raw.append((str(i), f"doc {i}", tokens))
    docs = build_tfidf(raw)

    for i in range(cfg.num_docs):
        # distinct non-self targets: sample from n-1 slots, shift past self
        targets = rng.choice(cfg.num_docs - 1, size=cfg.links_per_doc, replace=False)
        targets = np.where(targets >= i, targets + 1, targets)
        docs[i].out_links = [int(t) for t in targets]

    return DocumentGraph(docs)
