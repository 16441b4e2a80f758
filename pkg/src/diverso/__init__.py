"""Diversified top-k retrieval over directed document graphs."""

from .corpus import (
    CorpusError,
    Document,
    DocumentGraph,
    EmptyVectorError,
    RestrictionMode,
    RestrictionSet,
    TermVector,
    VertexNotFoundError,
    build_tfidf,
    compute_diameter,
    graph_distance,
    ingest_collection,
    text_distance,
)
from .engine import DivIterator, PartialScoreIndex, SourceSearch, verso
from .metrics import MemoryMeter
from .oracles import oracle_best_addendum, oracle_best_set
from .ranking import (
    RankParams,
    ScoredSet,
    Variant,
    diss_distance,
    marginal_gain,
    rel_distance,
    score_of,
)

__all__ = [
    "CorpusError",
    "DivIterator",
    "Document",
    "DocumentGraph",
    "EmptyVectorError",
    "MemoryMeter",
    "PartialScoreIndex",
    "RankParams",
    "RestrictionMode",
    "RestrictionSet",
    "ScoredSet",
    "SourceSearch",
    "TermVector",
    "Variant",
    "VertexNotFoundError",
    "build_tfidf",
    "compute_diameter",
    "diss_distance",
    "graph_distance",
    "ingest_collection",
    "marginal_gain",
    "oracle_best_addendum",
    "oracle_best_set",
    "rel_distance",
    "score_of",
    "text_distance",
    "verso",
]

__version__ = "0.1.0"
