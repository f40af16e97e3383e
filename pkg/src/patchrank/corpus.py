"""Corpus ingestion: patch CSV, manifest, and the on-disk snapshot store.

A corpus directory looks like:

    <root>/input-file.csv      Id,Susp,Method,Class-File,Covering-Tests
    <root>/manifest.json       {"patches": {"<id>": {"<test>":
                                   {"original": <relpath>, "patched": <relpath>}}}}
    <root>/snapshots/p<ID>/{original,patched}/<k>.snap
    <root>/failing-tests.txt   optional; one test name per line

Loading is all-or-nothing: every referenced snapshot file must decode and
validate, or loading aborts with a diagnostic naming patch, test and file.
The scan path used by `validate` collects every problem instead of stopping
at the first.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Mapping

from . import objgraph
from .errors import (
    CorpusError,
    DuplicatePatchId,
    InvalidSusp,
    InvalidTestName,
    MalformedRow,
    ManifestMismatch,
    MissingInputCsv,
    MissingManifest,
    MissingSnapshotFile,
    PatchRankError,
)
from .objgraph import DEFAULT_NODE_BUDGET, Snapshot, SnapshotDocument
from .ranking import PatchRecord, TestOutcome

INPUT_CSV_NAME = "input-file.csv"
MANIFEST_NAME = "manifest.json"
FAILING_TESTS_NAME = "failing-tests.txt"
CSV_HEADER = ("Id", "Susp", "Method", "Class-File", "Covering-Tests")

VERSIONS = ("original", "patched")


@dataclass(frozen=True)
class CorpusConfig:
    corpus_root: Path
    failing_tests: tuple[str, ...]
    node_budget: int = DEFAULT_NODE_BUDGET


@dataclass(frozen=True)
class Corpus:
    """A fully loaded, validated corpus; immutable and safe to share."""

    config: CorpusConfig
    patches: tuple[PatchRecord, ...]  # ascending id
    tests: tuple[str, ...]  # canonical (lexicographic) order
    outcomes: tuple[TestOutcome, ...]  # aligned with tests
    warnings: tuple[str, ...]
    docs: Mapping[tuple[int, str, str], SnapshotDocument] = field(repr=False)

    def patch_by_id(self, patch_id: int) -> PatchRecord:
        for patch in self.patches:
            if patch.id == patch_id:
                return patch
        raise KeyError(patch_id)

    def snapshots_for(self, patch_id: int, test: str, version: str) -> tuple[Snapshot, ...]:
        doc = self.docs.get((patch_id, test, version))
        return doc.snapshots if doc is not None else ()

    def snapshot_counts(self, patch_id: int, version: str) -> tuple[int, ...]:
        """Per-test exit counts in canonical test order; tests outside the
        patch's covering list count 0."""
        return tuple(len(self.snapshots_for(patch_id, test, version)) for test in self.tests)


def _valid_test_name(name: str) -> bool:
    # ClassName.MethodName: at least one dot, no whitespace
    return bool(name) and "." in name and not any(c.isspace() for c in name)


def _iter_csv_rows(data: bytes) -> Iterator[tuple[int, list[str]]]:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedRow(f"input CSV is not valid UTF-8: {exc}") from None
    reader = csv.reader(io.StringIO(text))
    for index, row in enumerate(reader):
        if not row:
            continue  # blank line
        if index == 0 and tuple(cell.strip() for cell in row) == CSV_HEADER:
            continue
        yield index, row


def _parse_row(index: int, row: list[str]) -> PatchRecord:
    if len(row) != 5:
        raise MalformedRow(f"row {index + 1}: expected 5 columns, got {len(row)}")
    raw_id, raw_susp, method, class_artifact, raw_tests = (cell.strip() for cell in row)
    try:
        patch_id = int(raw_id)
    except ValueError:
        raise MalformedRow(f"row {index + 1}: patch id {raw_id!r} is not an integer") from None
    if patch_id <= 0:
        raise MalformedRow(f"row {index + 1}: patch id must be positive, got {patch_id}")
    try:
        susp = Fraction(raw_susp)
    except (ValueError, ZeroDivisionError):
        raise InvalidSusp(f"row {index + 1}: suspiciousness {raw_susp!r} is not numeric") from None
    if not 0 <= susp <= 1:
        raise InvalidSusp(f"row {index + 1}: suspiciousness {raw_susp} outside [0, 1]")
    if not method:
        raise MalformedRow(f"row {index + 1}: empty method name")
    tests = tuple(raw_tests.split(" ")) if raw_tests else ()
    if not tests:
        raise MalformedRow(f"row {index + 1}: no covering tests")
    for test in tests:
        if not _valid_test_name(test):
            raise InvalidTestName(
                f"row {index + 1}: test name {test!r} is not of the form ClassName.MethodName")
    return PatchRecord(id=patch_id, susp=susp, method=method,
                       class_artifact=class_artifact, covering_tests=tests)


def parse_patch_csv(data: bytes) -> list[PatchRecord]:
    """Parse the patch descriptor CSV (header row optional)."""
    records: list[PatchRecord] = []
    seen: set[int] = set()
    for index, row in _iter_csv_rows(data):
        record = _parse_row(index, row)
        if record.id in seen:
            raise DuplicatePatchId(f"row {index + 1}: duplicate patch id {record.id}")
        seen.add(record.id)
        records.append(record)
    return records


@dataclass
class _Scan:
    """Intermediate scan state shared by load (fail fast) and validate
    (collect everything)."""

    records: list[PatchRecord] = field(default_factory=list)
    docs: dict[tuple[int, str, str], SnapshotDocument] = field(default_factory=dict)
    problems: list[PatchRankError] = field(default_factory=list)


def _scan_csv(root: Path, scan: _Scan) -> None:
    csv_path = root / INPUT_CSV_NAME
    if not csv_path.is_file():
        scan.problems.append(MissingInputCsv(f"missing {csv_path}"))
        return
    seen: set[int] = set()
    try:
        rows = list(_iter_csv_rows(csv_path.read_bytes()))
    except CorpusError as exc:
        scan.problems.append(exc)
        return
    for index, row in rows:
        try:
            record = _parse_row(index, row)
            if record.id in seen:
                raise DuplicatePatchId(f"row {index + 1}: duplicate patch id {record.id}")
            seen.add(record.id)
            scan.records.append(record)
        except CorpusError as exc:
            scan.problems.append(exc)
    scan.records.sort(key=lambda r: r.id)


def _scan_manifest(root: Path, scan: _Scan) -> dict[int, dict[str, dict[str, str]]]:
    manifest_path = root / MANIFEST_NAME
    if not manifest_path.is_file():
        scan.problems.append(MissingManifest(f"missing {manifest_path}"))
        return {}
    try:
        raw = json.loads(manifest_path.read_text(encoding="utf-8"))
    except (ValueError, UnicodeDecodeError) as exc:
        scan.problems.append(ManifestMismatch(f"manifest is not valid JSON: {exc}"))
        return {}
    if not isinstance(raw, dict) or not isinstance(raw.get("patches"), dict):
        scan.problems.append(ManifestMismatch('manifest must be {"patches": {...}}'))
        return {}
    out: dict[int, dict[str, dict[str, str]]] = {}
    for raw_id, tests in raw["patches"].items():
        try:
            patch_id = int(raw_id)
        except ValueError:
            scan.problems.append(ManifestMismatch(f"manifest patch key {raw_id!r} is not an id"))
            continue
        if not isinstance(tests, dict):
            scan.problems.append(ManifestMismatch(f"patch {patch_id}: entries must be an object"))
            continue
        entries: dict[str, dict[str, str]] = {}
        for test, paths in tests.items():
            if (not isinstance(paths, dict) or set(paths) != set(VERSIONS)
                    or not all(isinstance(p, str) for p in paths.values())):
                scan.problems.append(ManifestMismatch(
                    f"patch {patch_id} test {test}: expected "
                    '{"original": <path>, "patched": <path>}'))
                continue
            entries[test] = dict(paths)
        out[patch_id] = entries
    return out


def _scan_documents(root: Path, manifest: dict[int, dict[str, dict[str, str]]],
                    scan: _Scan, node_budget: int) -> None:
    by_id = {record.id: record for record in scan.records}
    for patch_id in sorted(set(by_id) | set(manifest)):
        if patch_id not in manifest:
            scan.problems.append(ManifestMismatch(f"patch {patch_id}: no manifest entry"))
            continue
        if patch_id not in by_id:
            scan.problems.append(ManifestMismatch(
                f"manifest names patch {patch_id} absent from the CSV"))
            continue
        record = by_id[patch_id]
        manifest_tests = set(manifest[patch_id])
        covering = set(record.covering_tests)
        if manifest_tests != covering:
            scan.problems.append(ManifestMismatch(
                f"patch {patch_id}: manifest tests {sorted(manifest_tests)} do not match "
                f"covering tests {sorted(covering)}"))
            continue
        for test in sorted(manifest[patch_id]):
            for version in VERSIONS:
                rel = manifest[patch_id][test][version]
                path = (root / rel)
                try:
                    resolved = path.resolve()
                    resolved.relative_to(root.resolve())
                except ValueError:
                    scan.problems.append(ManifestMismatch(
                        f"patch {patch_id} test {test}: path {rel!r} escapes the corpus root"))
                    continue
                if not path.is_file():
                    scan.problems.append(MissingSnapshotFile(
                        f"patch {patch_id} test {test} {version}: missing file {path}"))
                    continue
                try:
                    doc = objgraph.decode_snapshot_document(
                        path.read_bytes(), node_budget=node_budget)
                except PatchRankError as exc:
                    scan.problems.append(CorpusError(
                        f"patch {patch_id} test {test} {version} file {rel}: {exc}"))
                    continue
                context = f"patch {patch_id} test {test} {version} file {rel}"
                if doc.test_name != test:
                    scan.problems.append(CorpusError(
                        f"{context}: document test {doc.test_name!r} does not match"))
                if doc.method_name != record.method:
                    scan.problems.append(CorpusError(
                        f"{context}: document method {doc.method_name!r} does not match "
                        f"{record.method!r}"))
                for snap in doc.snapshots:
                    for violation in objgraph.validate_graph(snap.graph, node_budget=node_budget):
                        scan.problems.append(CorpusError(f"{context}: {violation}"))
                scan.docs[(patch_id, test, version)] = doc


def _scan_corpus(root: Path, node_budget: int) -> _Scan:
    scan = _Scan()
    _scan_csv(root, scan)
    manifest = _scan_manifest(root, scan)
    if scan.records or manifest:
        _scan_documents(root, manifest, scan, node_budget)
    return scan


def validate_report(root: Path, *, node_budget: int = DEFAULT_NODE_BUDGET) -> list[str]:
    """Every violation found in the corpus directory, one string each;
    empty means the corpus is valid."""
    if not root.is_dir():
        return [f"corpus directory {root} does not exist"]
    return [str(problem) for problem in _scan_corpus(root, node_budget).problems]


def read_failing_tests(path: Path) -> tuple[str, ...]:
    """Failing-test configuration: one test name per line, blanks ignored."""
    names = tuple(line.strip() for line in path.read_text(encoding="utf-8").splitlines()
                  if line.strip())
    for name in names:
        if not _valid_test_name(name):
            raise InvalidTestName(f"failing test {name!r} is not of the form ClassName.MethodName")
    return names


def load_corpus(config: CorpusConfig) -> Corpus:
    """Load and validate a corpus, or raise the first problem found."""
    root = Path(config.corpus_root)
    if not root.is_dir():
        raise CorpusError(f"corpus directory {root} does not exist")
    if not config.failing_tests:
        raise CorpusError("at least one failing test must be configured")
    scan = _scan_corpus(root, config.node_budget)
    if scan.problems:
        raise scan.problems[0]

    covered: set[str] = set()
    for record in scan.records:
        covered.update(record.covering_tests)
    tests = tuple(sorted(covered | set(config.failing_tests)))
    failing = set(config.failing_tests)
    outcomes = tuple(TestOutcome(test=test, failing=test in failing) for test in tests)
    warnings = tuple(
        f"failing test {test} does not cover any patch"
        for test in sorted(failing - covered))
    return Corpus(
        config=config,
        patches=tuple(scan.records),
        tests=tests,
        outcomes=outcomes,
        warnings=warnings,
        docs=dict(scan.docs),
    )
