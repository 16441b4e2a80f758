"""Benchmark harness: per-phase wall time, structure census and scores.

Each grid point runs every query through the greedy phase, the
hill-climbing phase and the adapted BestCoverage baseline, emitting one
CSV row per (query, method, phase). Query centers are drawn uniformly
(empty-vector documents excluded) from the given seed, so score and
census columns reproduce bit-for-bit across runs; only the timing column
varies.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .baseline import BaselineParams, best_coverage
from .corpus import DocumentGraph, RestrictionSet
from .metrics import MemoryMeter
from .pipeline import PipelineConfig, diversify_with_metrics
from .ranking import RankParams, Variant

CSV_COLUMNS = [
    "query_id",
    "center_id",
    "variant",
    "lambda",
    "alpha",
    "beta",
    "n",
    "kg",
    "kc",
    "method",
    "phase",
    "elapsed_ms",
    "logical_bytes_peak",
    "score",
]

TIMING_COLUMNS = ["elapsed_ms"]

DEFAULT_GRID_POINT = {
    "variant": "avg",
    "lambda": 0.8,
    "alpha": 0.0,
    "beta": 0.8,
    "n": 10,
    "kg": 2,
    "kc": 2,
    "ell": 2,
}


@dataclass
class MetricsRecord:
    query_id: int
    center_id: int
    variant: str
    lambda_: float
    alpha: float
    beta: float
    n: int
    kg: int
    kc: int
    method: str
    phase: str
    elapsed_ms: float
    logical_bytes_peak: int
    score: float

    def __post_init__(self):
        if self.elapsed_ms < 0 or self.logical_bytes_peak < 0:
            raise ValueError("elapsed and census values must be non-negative")

    def row(self) -> list:
        return [
            self.query_id,
            self.center_id,
            self.variant,
            f"{self.lambda_:g}",
            f"{self.alpha:g}",
            f"{self.beta:g}",
            self.n,
            self.kg,
            self.kc,
            self.method,
            self.phase,
            f"{self.elapsed_ms:.3f}",
            self.logical_bytes_peak,
            f"{self.score:.12g}",
        ]


def eligible_centers(graph: DocumentGraph) -> list[int]:
    """Vertices usable as query centers: non-empty term vectors only."""
    return [v for v in range(graph.vertex_count) if v not in graph.empty_vector_ids]


def run_benchmark(
    graph: DocumentGraph,
    grid: Sequence[dict] | None = None,
    queries: int = 100,
    seed: int = 0,
    out_path: str | None = None,
    restriction: RestrictionSet | None = None,
) -> list[MetricsRecord]:
    """Run the grid and return all records; optionally write the CSV."""
    if grid is None:
        grid = [dict(DEFAULT_GRID_POINT)]
    restriction = restriction or RestrictionSet.allow_all()

    centers = eligible_centers(graph)
    if not centers:
        raise ValueError("graph has no usable query centers")
    rng = np.random.default_rng(seed)
    replace = len(centers) < queries
    chosen = rng.choice(centers, size=queries, replace=replace)

    records: list[MetricsRecord] = []
    for point in grid:
        cfg = dict(DEFAULT_GRID_POINT)
        cfg.update(point)
        params = RankParams(
            lambda_=float(cfg["lambda"]),
            alpha=float(cfg["alpha"]),
            beta=float(cfg["beta"]),
            variant=Variant.parse(cfg["variant"]),
        )
        config = PipelineConfig(
            n=int(cfg["n"]),
            k_g=int(cfg["kg"]),
            k_c=int(cfg["kc"]),
            t_d_ms=float(cfg.get("td_ms", 0.0)),
            t_c_ms=float(cfg["tc_ms"]) if "tc_ms" in cfg else None,
        )
        bp = BaselineParams(ell=int(cfg["ell"]), params=params)
        common = dict(
            variant=params.variant.value,
            lambda_=params.lambda_,
            alpha=params.alpha,
            beta=params.beta,
            n=config.n,
            kg=config.k_g,
            kc=config.k_c,
        )
        for qid, center in enumerate(chosen):
            center = int(center)
            best, phases = diversify_with_metrics(
                graph, center, config.n, restriction, config, params
            )
            records.append(
                MetricsRecord(
                    query_id=qid,
                    center_id=center,
                    method="GREEDY_PHASE",
                    phase="greedy",
                    elapsed_ms=phases["greedy"].elapsed_ms,
                    logical_bytes_peak=phases["greedy"].logical_bytes_peak,
                    score=phases["greedy"].score,
                    **common,
                )
            )
            records.append(
                MetricsRecord(
                    query_id=qid,
                    center_id=center,
                    method="HILLCLIMB_PHASE",
                    phase="hillclimb",
                    elapsed_ms=phases["hillclimb"].elapsed_ms,
                    logical_bytes_peak=phases["hillclimb"].logical_bytes_peak,
                    score=best.score,
                    **common,
                )
            )
            meter = MemoryMeter()
            t0 = time.monotonic()
            try:
                cov = best_coverage(graph, center, config.n, restriction, bp, meter=meter)
                cov_score = cov.score
            except LookupError:
                cov_score = float("nan")
            cov_ms = (time.monotonic() - t0) * 1000.0
            records.append(
                MetricsRecord(
                    query_id=qid,
                    center_id=center,
                    method="BEST_COVERAGE",
                    phase="total",
                    elapsed_ms=cov_ms,
                    logical_bytes_peak=meter.peak,
                    score=cov_score,
                    **common,
                )
            )

    if out_path is not None:
        write_csv(records, out_path)
    return records


def write_csv(records: Sequence[MetricsRecord], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(CSV_COLUMNS)
        for r in records:
            w.writerow(r.row())


def csv_without_timing(path: str) -> str:
    """CSV content with timing columns dropped, for reproducibility checks."""
    drop = {CSV_COLUMNS.index(c) for c in TIMING_COLUMNS}
    out = io.StringIO()
    w = csv.writer(out)
    with open(path, "r", newline="", encoding="utf-8") as f:
        for row in csv.reader(f):
            w.writerow([c for i, c in enumerate(row) if i not in drop])
    return out.getvalue()
