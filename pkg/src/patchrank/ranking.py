"""Patch partitioning and similarity-based ranking.

Patches whose per-test exit counts changed go to the W bucket and are ranked
by suspiciousness alone. The rest are grouped into equivalence classes by
their exit-count signature; within a class, each patch gets a per-test
average state distance, per-test competition ranks (ascending on passing
tests, descending on failing ones), and a score equal to its mean rank.
Lower scores rank first. Class and W-bucket sequences are then concatenated
in order of decreasing maximum suspiciousness.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

from .distance import ExtendedRational, avg_pair_distance
from .errors import LengthMismatch

if TYPE_CHECKING:  # pragma: no cover
    from .corpus import Corpus


@dataclass(frozen=True)
class PatchRecord:
    """One plausible patch as described by the input CSV."""

    id: int
    susp: Fraction
    method: str
    class_artifact: str
    covering_tests: tuple[str, ...]


@dataclass(frozen=True)
class TestOutcome:
    test: str
    failing: bool  # outcome on the original program


CoverageSignature = tuple[int, ...]


@dataclass(frozen=True)
class PatchSignature:
    """A patch id with its exit-count signature and mismatch flag."""

    patch_id: int
    signature: CoverageSignature
    mismatch: bool


@dataclass(frozen=True)
class Partition:
    """W bucket plus equivalence classes; jointly a partition of all patches."""

    w_bucket: tuple[int, ...]
    classes: tuple[tuple[int, ...], ...]
    class_signatures: tuple[CoverageSignature, ...]


@dataclass(frozen=True)
class DistanceMatrix:
    """Average state distances for one class: rows are patches in ascending
    id order, columns the class's active tests in canonical order."""

    patch_ids: tuple[int, ...]
    tests: tuple[str, ...]
    entries: tuple[tuple[ExtendedRational, ...], ...]


@dataclass(frozen=True)
class RankedEntry:
    position: int
    patch_id: int
    provenance: str  # "W" or "S"
    score: ExtendedRational | None
    class_index: int | None

    def provenance_label(self) -> str:
        return "W" if self.provenance == "W" else f"S{self.class_index}"


@dataclass(frozen=True)
class RankedList:
    entries: tuple[RankedEntry, ...]

    def patch_ids(self) -> tuple[int, ...]:
        return tuple(e.patch_id for e in self.entries)


@dataclass(frozen=True)
class RankingResult:
    """Everything the ranking pipeline produced, for output and reporting."""

    partition: Partition
    matrices: tuple[DistanceMatrix, ...]
    class_orders: tuple[tuple[tuple[int, ExtendedRational | None], ...], ...]
    ranked: RankedList


def coverage_signature(original_counts: Sequence[int],
                       patched_counts: Sequence[int]) -> tuple[CoverageSignature, bool]:
    """Pair the patched exit-count vector with a flag telling whether any
    position differs from the original run's counts."""
    if len(original_counts) != len(patched_counts):
        raise LengthMismatch(
            f"count vectors disagree in length: {len(original_counts)} vs {len(patched_counts)}")
    signature = tuple(patched_counts)
    mismatch = any(o != p for o, p in zip(original_counts, patched_counts))
    return signature, mismatch


def partition(entries: Iterable[PatchSignature]) -> Partition:
    """Split patches into the W bucket (any count mismatch) and equivalence
    classes of identical signatures, in order of first-seen patch id."""
    w_bucket: list[int] = []
    class_ids: list[list[int]] = []
    signatures: list[CoverageSignature] = []
    index_of: dict[CoverageSignature, int] = {}
    for entry in sorted(entries, key=lambda e: e.patch_id):
        if entry.mismatch:
            w_bucket.append(entry.patch_id)
            continue
        at = index_of.get(entry.signature)
        if at is None:
            index_of[entry.signature] = len(class_ids)
            class_ids.append([entry.patch_id])
            signatures.append(entry.signature)
        else:
            class_ids[at].append(entry.patch_id)
    return Partition(
        w_bucket=tuple(w_bucket),
        classes=tuple(tuple(ids) for ids in class_ids),
        class_signatures=tuple(signatures),
    )


def build_distance_matrix(corpus: "Corpus", patch_ids: Sequence[int],
                          active_tests: Sequence[str], *, jobs: int = 1) -> DistanceMatrix:
    """Average original-vs-patched state distance for every (patch, test)
    cell of one class. Cells are independent; with jobs > 1 they are computed
    on a thread pool and assembled by index, so the result does not depend on
    scheduling."""
    def cell(patch_id: int, test: str) -> ExtendedRational:
        return avg_pair_distance(
            corpus.snapshots_for(patch_id, test, "original"),
            corpus.snapshots_for(patch_id, test, "patched"),
        )

    ids = tuple(sorted(patch_ids))
    tests = tuple(active_tests)
    if jobs > 1 and len(ids) * len(tests) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = {(i, j): pool.submit(cell, pid, test)
                       for i, pid in enumerate(ids) for j, test in enumerate(tests)}
            rows = tuple(
                tuple(futures[i, j].result() for j in range(len(tests)))
                for i in range(len(ids)))
    else:
        rows = tuple(tuple(cell(pid, test) for test in tests) for pid in ids)
    return DistanceMatrix(patch_ids=ids, tests=tests, entries=rows)


def column_ranks(column: Sequence[ExtendedRational], failing: bool) -> list[int]:
    """Competition ranks for one test column: 1 + the number of strictly
    better entries. Smaller distances are better on passing tests, larger on
    failing ones."""
    ranks = []
    for mine in column:
        if failing:
            better = sum(1 for other in column if other > mine)
        else:
            better = sum(1 for other in column if other < mine)
        ranks.append(1 + better)
    return ranks


def similarity_sort(matrix: DistanceMatrix,
            failing: Mapping[str, bool]) -> tuple[tuple[int, ExtendedRational | None], ...]:
    """Order one class best-first by mean per-column rank.

    Ties break by ascending patch id; a class with no active tests degrades
    to ascending patch id with undefined scores.
    """
    ids = matrix.patch_ids
    if not matrix.tests:
        return tuple((pid, None) for pid in sorted(ids))
    rank_rows: list[list[int]] = [[] for _ in ids]
    for j, test in enumerate(matrix.tests):
        column = [row[j] for row in matrix.entries]
        for i, rank in enumerate(column_ranks(column, failing[test])):
            rank_rows[i].append(rank)
    scores = [ExtendedRational.from_fraction(Fraction(sum(row), len(row)))
              for row in rank_rows]
    order = sorted(range(len(ids)), key=lambda i: (scores[i], ids[i]))
    return tuple((ids[i], scores[i]) for i in order)


def max_susp(patch_ids: Sequence[int], by_id: Mapping[int, PatchRecord]) -> Fraction:
    """Maximum suspiciousness over a non-empty patch sequence."""
    return max(by_id[pid].susp for pid in patch_ids)


def final_ranking(part: Partition,
                  class_orders: Sequence[Sequence[tuple[int, ExtendedRational | None]]],
                  by_id: Mapping[int, PatchRecord]) -> RankedList:
    """Concatenate W singletons and sorted classes into one total order.

    Sequences are ordered by decreasing maximum suspiciousness; on ties, W
    singletons come before classes, then ascending minimum patch id.
    Sequences are never interleaved.
    """
    sequences: list[tuple[Fraction, int, int, list[RankedEntry]]] = []
    for pid in part.w_bucket:
        entry = RankedEntry(0, pid, "W", None, None)
        sequences.append((by_id[pid].susp, 0, pid, [entry]))
    for class_index, order in enumerate(class_orders):
        ids = [pid for pid, _ in order]
        entries = [RankedEntry(0, pid, "S", score, class_index) for pid, score in order]
        sequences.append((max_susp(ids, by_id), 1, min(ids), entries))
    sequences.sort(key=lambda s: (-s[0], s[1], s[2]))
    ranked: list[RankedEntry] = []
    for _, _, _, entries in sequences:
        for entry in entries:
            ranked.append(RankedEntry(len(ranked) + 1, entry.patch_id, entry.provenance,
                                      entry.score, entry.class_index))
    return RankedList(entries=tuple(ranked))


def rank_corpus(corpus: "Corpus", *, jobs: int = 1) -> RankingResult:
    """Run the whole pipeline over a loaded corpus."""
    signatures = []
    for patch in corpus.patches:
        signature, mismatch = coverage_signature(
            corpus.snapshot_counts(patch.id, "original"),
            corpus.snapshot_counts(patch.id, "patched"))
        signatures.append(PatchSignature(patch.id, signature, mismatch))
    part = partition(signatures)

    failing = {outcome.test: outcome.failing for outcome in corpus.outcomes}
    matrices = []
    class_orders = []
    for ids, signature in zip(part.classes, part.class_signatures):
        active = tuple(test for test, count in zip(corpus.tests, signature) if count > 0)
        matrix = build_distance_matrix(corpus, ids, active, jobs=jobs)
        matrices.append(matrix)
        class_orders.append(similarity_sort(matrix, failing))
    by_id = {patch.id: patch for patch in corpus.patches}
    ranked = final_ranking(part, class_orders, by_id)
    return RankingResult(partition=part, matrices=tuple(matrices),
                         class_orders=tuple(class_orders), ranked=ranked)
