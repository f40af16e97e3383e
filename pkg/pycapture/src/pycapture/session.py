"""Capture sessions: one fresh child process per test, corpus-format output.

Each test command runs in its own interpreter (side effects stay contained,
and PYTHONHASHSEED is pinned so captures are reproducible). The session
writes snapshot documents under snapshots/p<ID>/<version>/ and merges its
entries into the corpus manifest.json; per-test capture diagnostics are
appended to capture-log.json.
"""

from __future__ import annotations

import json
import os
import subprocess
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .encode import DEFAULT_MAX_DEPTH, DEFAULT_NODE_BUDGET

MANIFEST_NAME = "manifest.json"
CAPTURE_LOG_NAME = "capture-log.json"


@dataclass(frozen=True)
class TestSpec:
    name: str  # corpus test name, ClassName.MethodName shape
    ref: str  # callable reference, module:function

    __test__ = False  # not a pytest class, despite the name


@dataclass(frozen=True)
class SessionConfig:
    target: str  # wrapped callable, module:function
    out_dir: Path
    patch_id: int
    version: str  # "original" or "patched"
    replace: str | None = None  # alternative implementation for patched runs
    method_name: str | None = None  # defaults to the target with ':' -> '.'
    max_depth: int = DEFAULT_MAX_DEPTH
    node_budget: int = DEFAULT_NODE_BUDGET

    def resolved_method_name(self) -> str:
        return self.method_name or self.target.replace(":", ".")


@dataclass
class SessionResult:
    documents: dict[str, str] = field(default_factory=dict)  # test name -> relpath
    failures: list[str] = field(default_factory=list)  # per-test process failures
    diagnostics: list[dict] = field(default_factory=list)


def run_capture_session(tests: list[TestSpec], config: SessionConfig) -> SessionResult:
    """Capture every test in a fresh process; process failures are recorded
    and the session continues with the remaining tests."""
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = SessionResult()
    env = dict(os.environ, PYTHONHASHSEED="0")

    with tempfile.TemporaryDirectory(prefix="pycapture-") as scratch:
        for index, spec in enumerate(tests):
            rel = f"snapshots/p{config.patch_id}/{config.version}/{index:03d}.snap"
            diagnostics_file = Path(scratch) / f"diag{index:03d}.json"
            child_config = {
                "target": config.target,
                "replace": config.replace,
                "test": spec.ref,
                "test_name": spec.name,
                "method_name": config.resolved_method_name(),
                "out_file": str(out_dir / rel),
                "diagnostics_file": str(diagnostics_file),
                "max_depth": config.max_depth,
                "node_budget": config.node_budget,
                "sys_path": [p for p in sys.path if p],
            }
            config_file = Path(scratch) / f"config{index:03d}.json"
            config_file.write_text(json.dumps(child_config), encoding="utf-8")
            proc = subprocess.run(
                [sys.executable, "-m", "pycapture.child", str(config_file)],
                capture_output=True, text=True, env=env)
            if proc.returncode != 0:
                result.failures.append(
                    f"{spec.name}: capture process exited {proc.returncode}: "
                    f"{proc.stderr.strip()[-500:]}")
                continue
            result.documents[spec.name] = rel
            diag = json.loads(diagnostics_file.read_text(encoding="utf-8"))
            diag["patch"] = config.patch_id
            diag["version"] = config.version
            result.diagnostics.append(diag)

    _merge_manifest(out_dir, config.patch_id, config.version, result.documents)
    _append_log(out_dir, result.diagnostics)
    return result


def _merge_manifest(out_dir: Path, patch_id: int, version: str,
                    documents: dict[str, str]) -> None:
    path = out_dir / MANIFEST_NAME
    manifest = {"patches": {}}
    if path.is_file():
        manifest = json.loads(path.read_text(encoding="utf-8"))
        manifest.setdefault("patches", {})
    for test, rel in documents.items():
        manifest["patches"].setdefault(str(patch_id), {}).setdefault(test, {})[version] = rel
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _append_log(out_dir: Path, diagnostics: list[dict]) -> None:
    if not diagnostics:
        return
    path = out_dir / CAPTURE_LOG_NAME
    log = json.loads(path.read_text(encoding="utf-8")) if path.is_file() else []
    fresh = {(d["patch"], d["version"], d["test"]) for d in diagnostics}
    log = [d for d in log if (d["patch"], d["version"], d["test"]) not in fresh]
    log.extend(diagnostics)
    log.sort(key=lambda d: (d["patch"], d["version"], d["test"]))
    path.write_text(json.dumps(log, indent=2, sort_keys=True) + "\n", encoding="utf-8")
