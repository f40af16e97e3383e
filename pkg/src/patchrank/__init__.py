"""patchrank: rank plausible repair patches by object-state similarity.

The library compares serialized object-graph snapshots taken at patched-
method exits between original and patched runs, groups patches by their
per-test exit-count signature, scores each class by per-test similarity
ranks, and concatenates the groups by maximum suspiciousness.
"""

from .corpus import Corpus, CorpusConfig, load_corpus, parse_patch_csv, validate_report
from .distance import (
    INFINITE_DISTANCE,
    INFINITE_RATIONAL,
    ExtendedDistance,
    ExtendedRational,
    avg_pair_distance,
    levenshtein,
    node_dist,
    snapshot_dist,
)
from .objgraph import (
    ObjectGraph,
    ObjectNode,
    Snapshot,
    SnapshotDocument,
    decode_snapshot_document,
    encode_snapshot_document,
    validate_graph,
)
from .ranking import (
    DistanceMatrix,
    Partition,
    PatchRecord,
    RankedList,
    RankingResult,
    TestOutcome,
    column_ranks,
    coverage_signature,
    final_ranking,
    max_susp,
    partition,
    rank_corpus,
    similarity_sort,
)
from .synthgen import GroundTruth, ScenarioParams, generate_scenario, perturb_graph

__version__ = "0.1.0"

__all__ = [
    "Corpus",
    "CorpusConfig",
    "DistanceMatrix",
    "ExtendedDistance",
    "ExtendedRational",
    "GroundTruth",
    "INFINITE_DISTANCE",
    "INFINITE_RATIONAL",
    "ObjectGraph",
    "ObjectNode",
    "Partition",
    "PatchRecord",
    "RankedList",
    "RankingResult",
    "ScenarioParams",
    "Snapshot",
    "SnapshotDocument",
    "TestOutcome",
    "avg_pair_distance",
    "column_ranks",
    "coverage_signature",
    "decode_snapshot_document",
    "encode_snapshot_document",
    "final_ranking",
    "generate_scenario",
    "levenshtein",
    "load_corpus",
    "max_susp",
    "node_dist",
    "parse_patch_csv",
    "partition",
    "perturb_graph",
    "rank_corpus",
    "similarity_sort",
    "snapshot_dist",
    "validate_graph",
    "validate_report",
]
