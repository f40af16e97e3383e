"""Acceptance for the capture adapter, one PASS/FAIL line per criterion.

The ranking engine is driven strictly through its external surfaces: the
corpus file formats on disk and the `patchrank` CLI in a subprocess.
"""

from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

from pycapture.session import SessionConfig, TestSpec, run_capture_session

PRIMARY_CLI = [sys.executable, "-m", "patchrank.cli"]

T_POS = TestSpec("capture_suite.t_pos", "capture_suite:t_pos")
T_MIX = TestSpec("capture_suite.t_mix", "capture_suite:t_mix")
T_NEG = TestSpec("capture_suite.t_neg", "capture_suite:t_neg")
T_CYCLE = TestSpec("capture_suite.t_cycle", "capture_suite:t_cycle")
T_THREE = TestSpec("capture_suite.t_three_calls", "capture_suite:t_three_calls")


def report(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def run_primary(*args: str) -> subprocess.CompletedProcess:
    return subprocess.run(PRIMARY_CLI + list(args), capture_output=True, text=True)


def capture(out: Path, *, target: str, tests: list[TestSpec], patch_id: int,
            version: str, replace: str | None = None) -> None:
    result = run_capture_session(tests, SessionConfig(
        target=target, out_dir=out, patch_id=patch_id, version=version, replace=replace))
    assert result.failures == [], result.failures


def write_csv(out: Path, rows: list[str]) -> None:
    header = "Id,Susp,Method,Class-File,Covering-Tests"
    (out / "input-file.csv").write_text("\n".join([header] + rows) + "\n", encoding="utf-8")


def test_schema_conformance(tmp_path: Path):
    """Every emitted corpus fragment passes the engine's validate command
    with exit 0, including a cyclic-object fixture and a 3-exit fixture."""
    out = tmp_path / "corpus"
    for version, replace_touch, replace_double in (
            ("original", None, None),
            ("patched", "capture_targets:touch_v2", "capture_targets:double_v2")):
        capture(out, target="capture_targets:touch", tests=[T_CYCLE],
                patch_id=1, version=version, replace=replace_touch)
        capture(out, target="capture_targets:double", tests=[T_THREE],
                patch_id=2, version=version, replace=replace_double)
    write_csv(out, [
        f"1,0.5,capture_targets.touch,Node.class,{T_CYCLE.name}",
        f"2,0.5,capture_targets.double,Num.class,{T_THREE.name}",
    ])

    proc = run_primary("validate", "--corpus", str(out))
    cyclic_doc = json.loads((out / "snapshots/p1/original/000.snap").read_text())
    [cyclic_snap] = cyclic_doc["snapshots"]
    node_payload = {n["id"]: n for n in cyclic_snap["nodes"]}
    root = cyclic_snap["roots"][0]
    cycle_ok = node_payload[root]["fields"]["next"] == root
    three_doc = json.loads((out / "snapshots/p2/original/000.snap").read_text())
    exits_ok = [s["exit"] for s in three_doc["snapshots"]] == [0, 1, 2]
    ok = proc.returncode == 0 and proc.stdout == "" and cycle_ok and exits_ok
    report("capture-schema-conformance", ok,
           f"validate exit {proc.returncode}, cyclic self-reference {cycle_ok}, "
           f"three exits {exits_ok}"
           + (f"; report: {proc.stdout!r}" if proc.stdout else ""))


def test_cross_component_pipeline(tmp_path: Path):
    """A captured mini-corpus (two alternative implementations as patches,
    three tests) ranks the version matching original passing behavior first,
    even though the other patch carries the higher suspiciousness."""
    out = tmp_path / "corpus"
    tests = [T_MIX, T_NEG, T_POS]
    target = "capture_targets:record_value"
    # patch 1: the overfitted rewrite (higher suspiciousness)
    capture(out, target=target, tests=tests, patch_id=1, version="original")
    capture(out, target=target, tests=tests, patch_id=1, version="patched",
            replace="capture_targets:record_value_overfit")
    # patch 2: the genuine fix (lower suspiciousness)
    capture(out, target=target, tests=tests, patch_id=2, version="original")
    capture(out, target=target, tests=tests, patch_id=2, version="patched",
            replace="capture_targets:record_value_fixed")
    write_csv(out, [
        f"1,0.9,capture_targets.record_value,Stats.class,{T_MIX.name} {T_NEG.name} {T_POS.name}",
        f"2,0.6,capture_targets.record_value,Stats.class,{T_MIX.name} {T_NEG.name} {T_POS.name}",
    ])
    (out / "failing-tests.txt").write_text(T_NEG.name + "\n", encoding="utf-8")

    validate = run_primary("validate", "--corpus", str(out))
    rank = run_primary("rank", "--corpus", str(out))
    lines = (out / "ranked.csv").read_text().splitlines() if rank.returncode == 0 else []
    first_patch = lines[1].split(",")[1] if len(lines) > 1 else "?"
    ok = validate.returncode == 0 and rank.returncode == 0 and first_patch == "2"
    report("capture-cross-component-pipeline", ok,
           f"validate exit {validate.returncode}, rank exit {rank.returncode}, "
           f"top patch {first_patch} (want 2, the genuine fix despite susp 0.6 vs 0.9)")
