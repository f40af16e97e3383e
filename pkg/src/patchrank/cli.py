"""Command-line surface: rank a corpus, validate a corpus, generate one.

Exit codes: 0 success, 1 data error, 2 usage error. Diagnostics go to
stderr; stdout carries only requested data.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .corpus import (
    FAILING_TESTS_NAME,
    CorpusConfig,
    load_corpus,
    read_failing_tests,
    validate_report,
)
from .errors import CorpusError, InvalidParams, PatchRankError
from .objgraph import DEFAULT_NODE_BUDGET
from .ranking import RankingResult, rank_corpus
from .synthgen import ScenarioParams, generate_scenario


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="patchrank",
        description="Rank plausible repair patches by object-state similarity.")
    sub = parser.add_subparsers(dest="command", required=True)

    rank = sub.add_parser("rank", help="rank a corpus and write the ranked CSV")
    rank.add_argument("--corpus", required=True, help="corpus directory")
    rank.add_argument("--failing-tests",
                      help=f"file with one failing test per line "
                           f"(default: <corpus>/{FAILING_TESTS_NAME})")
    rank.add_argument("--output", help="ranked CSV path (default: <corpus>/ranked.csv)")
    rank.add_argument("--plain", help="also write a plain patch-id list, best first")
    rank.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                      help="worker threads for distance computation")
    rank.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET,
                      help="maximum nodes per object graph")
    rank.add_argument("--figures", help="also render report figures into this directory")
    rank.set_defaults(func=_cmd_rank)

    validate = sub.add_parser("validate", help="check CSV, manifest and snapshot files")
    validate.add_argument("--corpus", required=True, help="corpus directory")
    validate.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
    validate.set_defaults(func=_cmd_validate)

    synth = sub.add_parser("synth", help="generate a synthetic corpus with ground truth")
    synth.add_argument("--seed", type=int, required=True)
    synth.add_argument("--patches", type=int, required=True)
    synth.add_argument("--tests", type=int, required=True)
    synth.add_argument("--out", required=True, help="output corpus directory")
    synth.add_argument("--edit-noise", type=int, default=0,
                       help="max edits applied to non-planted patches")
    synth.add_argument("--w-fraction", type=float, default=0.0,
                       help="share of patches forced into the W bucket")
    synth.add_argument("--graph-min", type=int, default=8)
    synth.add_argument("--graph-max", type=int, default=24)
    synth.set_defaults(func=_cmd_synth)
    return parser


def _rank_output_bytes(result: RankingResult) -> bytes:
    lines = ["position,patch_id,provenance,score"]
    for entry in result.ranked.entries:
        score = str(entry.score) if entry.score is not None else "-"
        lines.append(f"{entry.position},{entry.patch_id},{entry.provenance_label()},{score}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _cmd_rank(args: argparse.Namespace) -> int:
    root = Path(args.corpus)
    if not root.is_dir():
        raise CorpusError(f"corpus directory {root} does not exist")
    if args.failing_tests:
        failing_path = Path(args.failing_tests)
    else:
        failing_path = root / FAILING_TESTS_NAME
    if not failing_path.is_file():
        raise CorpusError(
            f"no failing-tests configuration: pass --failing-tests or add {failing_path}")
    config = CorpusConfig(
        corpus_root=root,
        failing_tests=read_failing_tests(failing_path),
        node_budget=args.node_budget,
    )
    corpus = load_corpus(config)
    for warning in corpus.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    result = rank_corpus(corpus, jobs=max(1, args.jobs))

    output = Path(args.output) if args.output else root / "ranked.csv"
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_bytes(_rank_output_bytes(result))
    if args.plain:
        plain = Path(args.plain)
        plain.parent.mkdir(parents=True, exist_ok=True)
        plain.write_bytes(
            ("\n".join(str(pid) for pid in result.ranked.patch_ids()) + "\n").encode("utf-8"))
    if args.figures:
        from .figures import render_figures

        written = render_figures(corpus, result, Path(args.figures))
        print(f"wrote {len(written)} figures to {args.figures}", file=sys.stderr)
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    report = validate_report(Path(args.corpus), node_budget=args.node_budget)
    for line in report:
        print(line)
    return 1 if report else 0


def _cmd_synth(args: argparse.Namespace) -> int:
    try:
        params = ScenarioParams(
            seed=args.seed,
            n_patches=args.patches,
            n_tests=args.tests,
            graph_size=(args.graph_min, args.graph_max),
            edit_noise=args.edit_noise,
            w_fraction=args.w_fraction,
        )
        truth = generate_scenario(params, Path(args.out))
    except InvalidParams as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"generated corpus at {args.out} (planted patch {truth.planted})", file=sys.stderr)
    return 0


def main(argv: list[str] | None = None) -> int:
    # deep object graphs recurse one frame set per level
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except PatchRankError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
