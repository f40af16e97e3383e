"""Child-process entry: run one test against one wrapped target version.

Reads a JSON config file (path as the only argument), installs the wrapper,
runs the test callable, and always writes the snapshot document plus a
diagnostics JSON. A test that raises is a legitimate capture (failing tests
are corpus inputs too); only infrastructure errors exit non-zero.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from .capture import ExitRecorder, install_wrapper, resolve_ref
from .encode import DEFAULT_MAX_DEPTH, DEFAULT_NODE_BUDGET, document_bytes


def main(argv: list[str] | None = None) -> int:
    args = sys.argv[1:] if argv is None else argv
    if len(args) != 1:
        print("usage: python -m pycapture.child <config.json>", file=sys.stderr)
        return 2
    config = json.loads(Path(args[0]).read_text(encoding="utf-8"))
    for entry in reversed(config.get("sys_path", [])):
        if entry not in sys.path:
            sys.path.insert(0, entry)

    impl_ref = config.get("replace") or config["target"]
    impl = resolve_ref(impl_ref)[3]
    test_fn = resolve_ref(config["test"])[3]

    recorder = ExitRecorder(
        max_depth=config.get("max_depth", DEFAULT_MAX_DEPTH),
        node_budget=config.get("node_budget", DEFAULT_NODE_BUDGET),
    )
    install_wrapper(config["target"], impl, recorder)

    outcome = "passed"
    try:
        test_fn()
    except Exception as exc:
        outcome = f"raised {type(exc).__name__}: {exc}"

    out_file = Path(config["out_file"])
    out_file.parent.mkdir(parents=True, exist_ok=True)
    out_file.write_bytes(document_bytes(
        config["test_name"], config["method_name"], recorder.snapshots))

    diagnostics = {
        "test": config["test_name"],
        "outcome": outcome,
        "exits": len(recorder.snapshots),
        "truncated": recorder.stats.truncated,
        "budget_hits": recorder.stats.budget_hits,
        "capture_errors": recorder.stats.capture_errors,
    }
    Path(config["diagnostics_file"]).write_text(
        json.dumps(diagnostics, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return 0


if __name__ == "__main__":
    sys.exit(main())
