"""Session behavior: fresh processes, manifest merging, failure handling."""

from __future__ import annotations

import json
from pathlib import Path

from pycapture.session import SessionConfig, TestSpec, run_capture_session

T_THREE = TestSpec("capture_suite.t_three_calls", "capture_suite:t_three_calls")
T_NEVER = TestSpec("capture_suite.t_never_calls", "capture_suite:t_never_calls")
T_MARKER = TestSpec("capture_suite.t_set_marker", "capture_suite:t_set_marker")


def session(out: Path, tests, *, target="capture_targets:double", patch_id=1,
            version="original", replace=None) -> tuple:
    config = SessionConfig(target=target, out_dir=out, patch_id=patch_id,
                           version=version, replace=replace)
    return run_capture_session(tests, config), config


def test_two_tests_two_documents_and_manifest(tmp_path: Path):
    result, _ = session(tmp_path, [T_THREE, T_NEVER])
    assert result.failures == []
    assert len(result.documents) == 2
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    entry = manifest["patches"]["1"]
    assert set(entry) == {T_THREE.name, T_NEVER.name}
    assert entry[T_THREE.name]["original"].endswith("000.snap")
    for rel in (paths["original"] for paths in entry.values()):
        assert (tmp_path / rel).is_file()


def test_three_exits_consecutive(tmp_path: Path):
    session(tmp_path, [T_THREE])
    doc = json.loads((tmp_path / "snapshots/p1/original/000.snap").read_text())
    assert [s["exit"] for s in doc["snapshots"]] == [0, 1, 2]
    assert doc["method"] == "capture_targets.double"
    assert doc["test"] == T_THREE.name


def test_uncalled_target_yields_empty_document(tmp_path: Path):
    session(tmp_path, [T_NEVER])
    doc = json.loads((tmp_path / "snapshots/p1/original/000.snap").read_text())
    assert doc["snapshots"] == []


def test_side_effects_stay_in_the_child_process(tmp_path: Path):
    import capture_targets as targets

    before = targets.GLOBAL_MARKER
    result, _ = session(tmp_path, [T_MARKER], target="capture_targets:set_marker")
    assert result.failures == []
    assert targets.GLOBAL_MARKER == before  # the child mutated its own copy


def test_failing_test_is_still_captured(tmp_path: Path):
    spec = TestSpec("capture_suite.t_explode", "capture_suite:t_explode")
    result, _ = session(tmp_path, [spec], target="capture_targets:explode")
    assert result.failures == []  # a raising test is a capture, not a process failure
    [diag] = result.diagnostics
    assert diag["outcome"].startswith("raised ValueError")
    assert diag["exits"] == 1


def test_unresolvable_test_is_a_process_failure(tmp_path: Path):
    bad = TestSpec("capture_suite.t_missing", "capture_suite:does_not_exist")
    result, _ = session(tmp_path, [bad, T_THREE])
    assert len(result.failures) == 1
    assert "t_missing" in result.failures[0]
    assert T_THREE.name in result.documents  # session continued


def test_capture_determinism(tmp_path: Path):
    session(tmp_path / "a", [T_THREE])
    session(tmp_path / "b", [T_THREE])
    doc_a = (tmp_path / "a/snapshots/p1/original/000.snap").read_bytes()
    doc_b = (tmp_path / "b/snapshots/p1/original/000.snap").read_bytes()
    assert doc_a == doc_b


def test_manifest_merges_versions_and_patches(tmp_path: Path):
    session(tmp_path, [T_THREE], version="original")
    session(tmp_path, [T_THREE], version="patched", replace="capture_targets:double_v2")
    session(tmp_path, [T_THREE], patch_id=2, version="original")
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert set(manifest["patches"]) == {"1", "2"}
    assert set(manifest["patches"]["1"][T_THREE.name]) == {"original", "patched"}
    log = json.loads((tmp_path / "capture-log.json").read_text())
    assert len(log) == 3
