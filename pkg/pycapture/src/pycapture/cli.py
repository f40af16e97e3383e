"""pycapture command line: capture one (patch, version) run over some tests.

    pycapture --target mod:fn --tests NAME=mod:test_fn ... --out DIR
              --patch-id N --version {original,patched}
              [--replace mod:alt_fn] [--method-name NAME]
              [--max-depth N] [--node-budget N]

Repeated invocations against the same --out directory accumulate a corpus:
snapshot files plus merged manifest.json entries. Exit code 1 if any test's
capture process failed (the session still finishes the other tests).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .encode import DEFAULT_MAX_DEPTH, DEFAULT_NODE_BUDGET
from .session import SessionConfig, TestSpec, run_capture_session


def _parse_test_spec(raw: str) -> TestSpec:
    name, sep, ref = raw.partition("=")
    if not sep or "." not in name or ":" not in ref or any(c.isspace() for c in name):
        raise argparse.ArgumentTypeError(
            f"test spec {raw!r} must look like Class.method=module:function")
    return TestSpec(name=name, ref=ref)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pycapture",
        description="Capture object-graph snapshots at every exit of a wrapped function.")
    parser.add_argument("--target", required=True, help="wrapped callable, module:function")
    parser.add_argument("--tests", required=True, nargs="+", type=_parse_test_spec,
                        metavar="NAME=MODULE:FUNC", help="test name and callable pairs")
    parser.add_argument("--out", required=True, help="corpus directory to write into")
    parser.add_argument("--patch-id", required=True, type=int)
    parser.add_argument("--version", required=True, choices=("original", "patched"))
    parser.add_argument("--replace", help="implementation to run instead of the target "
                                          "(patched versions)")
    parser.add_argument("--method-name", help="method name recorded in documents "
                                              "(default: target with ':' as '.')")
    parser.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH)
    parser.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    config = SessionConfig(
        target=args.target,
        out_dir=Path(args.out),
        patch_id=args.patch_id,
        version=args.version,
        replace=args.replace,
        method_name=args.method_name,
        max_depth=args.max_depth,
        node_budget=args.node_budget,
    )
    result = run_capture_session(list(args.tests), config)
    for failure in result.failures:
        print(f"error: {failure}", file=sys.stderr)
    print(f"captured {len(result.documents)}/{len(args.tests)} tests for "
          f"patch {args.patch_id} ({args.version}) into {args.out}", file=sys.stderr)
    return 1 if result.failures else 0


if __name__ == "__main__":
    sys.exit(main())
