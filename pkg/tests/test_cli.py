"""CLI surface: exit codes, output formats, stream discipline, figures."""

from __future__ import annotations

from pathlib import Path

import pytest

from helpers import fields_graph, write_corpus
from patchrank.cli import main

DATA = Path(__file__).parent / "data"
FIXTURE = DATA / "fixture_corpus"


def test_rank_fixture_matches_golden(tmp_path: Path, capsys):
    out = tmp_path / "ranked.csv"
    plain = tmp_path / "ranked.txt"
    rc = main(["rank", "--corpus", str(FIXTURE), "--output", str(out), "--plain", str(plain)])
    assert rc == 0
    assert out.read_bytes() == (DATA / "golden_ranked.csv").read_bytes()
    assert plain.read_bytes() == (DATA / "golden_ranked_plain.txt").read_bytes()
    assert capsys.readouterr().out == ""  # stdout carries only requested data


def test_rank_default_output_under_corpus_root(tmp_path: Path):
    corpus = tmp_path / "corpus"
    import shutil

    shutil.copytree(FIXTURE, corpus)
    rc = main(["rank", "--corpus", str(corpus)])
    assert rc == 0
    assert (corpus / "ranked.csv").read_bytes() == (DATA / "golden_ranked.csv").read_bytes()


def test_rank_jobs_do_not_change_bytes(tmp_path: Path):
    out_1 = tmp_path / "a.csv"
    out_8 = tmp_path / "b.csv"
    assert main(["rank", "--corpus", str(FIXTURE), "--output", str(out_1), "--jobs", "1"]) == 0
    assert main(["rank", "--corpus", str(FIXTURE), "--output", str(out_8), "--jobs", "8"]) == 0
    assert out_1.read_bytes() == out_8.read_bytes()


def test_rank_missing_corpus_dir(tmp_path: Path, capsys):
    rc = main(["rank", "--corpus", str(tmp_path / "missing")])
    assert rc == 1
    err = capsys.readouterr().err
    assert "missing" in err


def test_rank_without_failing_tests_configuration(tmp_path: Path, capsys):
    corpus = tmp_path / "corpus"
    write_corpus(
        corpus,
        csv_rows=["1,0.5,a.B.c,B.class,x.Y.t"],
        docs={
            (1, "x.Y.t", "original"): ("a.B.c", [fields_graph({"a": 1})]),
            (1, "x.Y.t", "patched"): ("a.B.c", [fields_graph({"a": 1})]),
        },
    )
    rc = main(["rank", "--corpus", str(corpus)])
    assert rc == 1
    assert "failing-tests" in capsys.readouterr().err


def test_rank_warns_on_uncovered_failing_test(tmp_path: Path, capsys):
    corpus = tmp_path / "corpus"
    write_corpus(
        corpus,
        csv_rows=["1,0.5,a.B.c,B.class,x.Y.t"],
        docs={
            (1, "x.Y.t", "original"): ("a.B.c", [fields_graph({"a": 1})]),
            (1, "x.Y.t", "patched"): ("a.B.c", [fields_graph({"a": 1})]),
        },
        failing=["zz.Gone.t"],
    )
    rc = main(["rank", "--corpus", str(corpus)])
    assert rc == 0
    assert "zz.Gone.t" in capsys.readouterr().err


def test_bad_flags_exit_2(capsys):
    assert main(["rank"]) == 2  # missing --corpus
    assert main(["frobnicate"]) == 2
    assert main([]) == 2


def test_validate_fixture_ok(capsys):
    rc = main(["validate", "--corpus", str(FIXTURE)])
    assert rc == 0
    assert capsys.readouterr().out == ""


def test_validate_reports_corruption(tmp_path: Path, capsys):
    import shutil

    corpus = tmp_path / "corpus"
    shutil.copytree(FIXTURE, corpus)
    victim = corpus / "snapshots/p2/original/000.snap"
    victim.write_bytes(b"garbage")
    rc = main(["validate", "--corpus", str(corpus)])
    assert rc == 1
    out = capsys.readouterr().out
    assert "000.snap" in out and "patch 2" in out


def test_validate_reports_bad_susp(tmp_path: Path, capsys):
    import shutil

    corpus = tmp_path / "corpus"
    shutil.copytree(FIXTURE, corpus)
    csv_path = corpus / "input-file.csv"
    csv_path.write_text(csv_path.read_text().replace("1,0.6,", "1,1.5,"), encoding="utf-8")
    rc = main(["validate", "--corpus", str(corpus)])
    assert rc == 1
    assert "suspiciousness" in capsys.readouterr().out


def test_synth_then_validate_pipeline(tmp_path: Path):
    out = tmp_path / "corpus"
    rc = main(["synth", "--seed", "42", "--patches", "10", "--tests", "6", "--out", str(out)])
    assert rc == 0
    assert main(["validate", "--corpus", str(out)]) == 0
    import json

    truth = json.loads((out / "ground-truth.json").read_text())
    csv_text = (out / "input-file.csv").read_text()
    assert any(line.startswith(f"{truth['planted']},") for line in csv_text.splitlines())


def test_synth_seed_reproducible(tmp_path: Path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    for out in (a, b):
        assert main(["synth", "--seed", "9", "--patches", "4", "--tests", "3",
                     "--out", str(out), "--w-fraction", "0.25", "--edit-noise", "1"]) == 0
    rel_a = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
    rel_b = sorted(p.relative_to(b) for p in b.rglob("*") if p.is_file())
    assert rel_a == rel_b
    assert all((a / rel).read_bytes() == (b / rel).read_bytes() for rel in rel_a)


def test_synth_invalid_params_exit_2(tmp_path: Path, capsys):
    rc = main(["synth", "--seed", "1", "--patches", "1", "--tests", "3",
               "--out", str(tmp_path / "c")])
    assert rc == 2
    assert "patches" in capsys.readouterr().err


def test_rank_renders_figures(tmp_path: Path):
    figures = tmp_path / "figs"
    rc = main(["rank", "--corpus", str(FIXTURE), "--output", str(tmp_path / "r.csv"),
               "--figures", str(figures)])
    assert rc == 0
    pngs = sorted(p.name for p in figures.glob("*.png"))
    assert "ranking_scores.png" in pngs
    assert any(name.startswith("class0") for name in pngs)


@pytest.mark.parametrize("jobs", ["1", "3"])
def test_rank_synth_corpus_roundtrip(tmp_path: Path, jobs):
    out = tmp_path / "corpus"
    assert main(["synth", "--seed", "77", "--patches", "6", "--tests", "4",
                 "--out", str(out), "--w-fraction", "0.34"]) == 0
    assert main(["rank", "--corpus", str(out), "--jobs", jobs]) == 0
    lines = (out / "ranked.csv").read_text().splitlines()
    assert lines[0] == "position,patch_id,provenance,score"
    assert len(lines) == 7
