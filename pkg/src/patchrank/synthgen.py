"""Seeded generator of synthetic snapshot corpora with a planted best patch.

Scenarios are built constructively so that every realized distance is
provable, not estimated: generated graphs are trees (no shared substructure,
which the recursive distance would double-count), all snapshots of one
(patch, test, version) document are copies of a single graph (so the
cross-product average equals the single-pair distance), and patched graphs
are produced by editing exactly k integer leaves to fresh values (so the
realized distance is exactly k).

The planted patch keeps distance 0 on passing tests and the strictly
largest distance on the failing test; its suspiciousness stays strictly
below the maximum, so ranking it first requires the similarity signal.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .distance import ExtendedRational
from .errors import InsufficientLeaves, InvalidParams
from .objgraph import (
    Kind,
    ObjectGraph,
    ObjectNode,
    Snapshot,
    SnapshotDocument,
    array_node,
    encode_bool,
    encode_f64,
    encode_int,
    encode_snapshot_document,
    object_node,
    primitive_node,
    string_node,
)

METHOD_NAME = "synth.Target.run"
CLASS_ARTIFACT = "Target.class"
GROUND_TRUTH_NAME = "ground-truth.json"


@dataclass(frozen=True)
class ScenarioParams:
    seed: int
    n_patches: int
    n_tests: int
    graph_size: tuple[int, int] = (8, 24)
    edit_noise: int = 0
    w_fraction: float = 0.0

    def __post_init__(self) -> None:
        if not 0 <= self.seed < 2**64:
            raise InvalidParams("seed must be an unsigned 64-bit integer")
        if self.n_patches < 2:
            raise InvalidParams("need at least 2 patches (one must out-suspicion the planted one)")
        if self.n_tests < 2:
            raise InvalidParams("need at least 2 tests (one passing and one failing)")
        lo, hi = self.graph_size
        if not 2 <= lo <= hi:
            raise InvalidParams(f"degenerate graph size range {self.graph_size}")
        if self.edit_noise < 0:
            raise InvalidParams("edit_noise must be non-negative")
        if not 0.0 <= self.w_fraction <= 1.0:
            raise InvalidParams("w_fraction must be in [0, 1]")


@dataclass(frozen=True)
class GroundTruth:
    """The planted patch plus every patch's intended per-test distance."""

    planted: int
    intended: Mapping[int, Mapping[str, ExtendedRational]]

    def to_json_bytes(self) -> bytes:
        payload = {
            "planted": self.planted,
            "intended": {
                str(pid): {test: str(value) for test, value in per_test.items()}
                for pid, per_test in self.intended.items()
            },
        }
        return (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode("utf-8")

    @classmethod
    def from_json_bytes(cls, data: bytes) -> "GroundTruth":
        raw = json.loads(data.decode("utf-8"))
        intended = {
            int(pid): {test: ExtendedRational.parse(value) for test, value in per_test.items()}
            for pid, per_test in raw["intended"].items()
        }
        return cls(planted=int(raw["planted"]), intended=intended)


# --- tree construction ---------------------------------------------------------

_WORDS = ("alpha", "beta", "gamma", "delta", "omega", "sigma", "")


def _random_tree(rng: random.Random, target_size: int, min_int_leaves: int) -> ObjectGraph:
    """A tree-shaped object graph with at least min_int_leaves int leaves.

    Every node has exactly one parent, so recursive distances over edited
    copies add up leaf by leaf.
    """
    nodes: list[ObjectNode | None] = []
    fields_of: dict[int, dict[str, int]] = {}
    field_counter: dict[int, int] = {}

    def new_id() -> int:
        nodes.append(None)
        return len(nodes) - 1

    def add_field(parent: int, child: int) -> None:
        name = f"f{field_counter[parent]:02d}"
        field_counter[parent] += 1
        fields_of[parent][name] = child

    def new_object(parent: int | None) -> int:
        nid = new_id()
        fields_of[nid] = {}
        field_counter[nid] = 0
        nodes[nid] = object_node(nid, f"synth.Obj{nid}", {})  # fields patched at the end
        if parent is not None:
            add_field(parent, nid)
        return nid

    def new_int_leaf(parent: int) -> None:
        nid = new_id()
        nodes[nid] = primitive_node(nid, "int", encode_int(rng.randrange(0, 1000)))
        add_field(parent, nid)

    root = new_object(None)
    objects = [root]
    for _ in range(min_int_leaves):
        new_int_leaf(rng.choice(objects))

    while len(nodes) < target_size:
        parent = rng.choice(objects)
        pick = rng.randrange(6)
        if pick == 0:
            new_int_leaf(parent)
        elif pick == 1:
            nid = new_id()
            nodes[nid] = primitive_node(nid, "boolean", encode_bool(rng.random() < 0.5))
            add_field(parent, nid)
        elif pick == 2:
            nid = new_id()
            nodes[nid] = primitive_node(nid, "double", encode_f64(rng.uniform(-10.0, 10.0)))
            add_field(parent, nid)
        elif pick == 3:
            nid = new_id()
            nodes[nid] = string_node(nid, rng.choice(_WORDS))
            add_field(parent, nid)
        elif pick == 4:
            arr = new_id()
            elems = []
            for _ in range(rng.randint(2, 4)):
                leaf = new_id()
                nodes[leaf] = primitive_node(leaf, "int", encode_int(rng.randrange(0, 1000)))
                elems.append(leaf)
            nodes[arr] = array_node(arr, "int", elems)
            add_field(parent, arr)
        else:
            objects.append(new_object(parent))

    final = []
    for node in nodes:
        assert node is not None
        if node.kind is Kind.OBJECT:
            final.append(object_node(node.id, node.type_name or "", fields_of[node.id]))
        else:
            final.append(node)
    return ObjectGraph(final, roots=(root,))


def _int_leaf_ids(graph: ObjectGraph) -> list[int]:
    return [n.id for n in graph.nodes
            if n.kind is Kind.PRIMITIVE and n.type_name == "int"]


def perturb_graph(graph: ObjectGraph, k: int, rng: random.Random) -> ObjectGraph:
    """A copy of the graph with exactly k int leaves changed to fresh values.

    Fresh values are distinct from every int value in the graph (and from
    each other), so for tree-shaped graphs the recursive distance between
    original and copy is exactly k.
    """
    if k == 0:
        return graph
    leaf_ids = _int_leaf_ids(graph)
    if len(leaf_ids) < k:
        raise InsufficientLeaves(f"need {k} editable int leaves, graph has {len(leaf_ids)}")
    chosen = rng.sample(leaf_ids, k)
    existing = {int(n.value or "0") for n in graph.nodes
                if n.kind is Kind.PRIMITIVE and n.type_name == "int"}
    fresh_base = max(existing, default=0) + 1
    replacements = {nid: fresh_base + offset for offset, nid in enumerate(chosen)}
    new_nodes = [
        primitive_node(n.id, "int", encode_int(replacements[n.id]))
        if n.id in replacements else n
        for n in graph.nodes
    ]
    return ObjectGraph(new_nodes, graph.roots)


# --- scenario generation ---------------------------------------------------------

def _intended_edits(params: ScenarioParams, rng: random.Random, ids: list[int],
                    planted: int, tests: list[str], failing_test: str) -> dict[int, dict[str, int]]:
    planted_failing = params.edit_noise + 2
    intended: dict[int, dict[str, int]] = {}
    for pid in ids:
        per_test: dict[str, int] = {}
        for test in tests:
            if pid == planted:
                per_test[test] = planted_failing if test == failing_test else 0
            elif test == failing_test:
                per_test[test] = rng.randint(1, max(1, params.edit_noise))
            else:
                per_test[test] = rng.randint(1, params.edit_noise) if params.edit_noise else 0
        intended[pid] = per_test
    return intended


def generate_scenario(params: ScenarioParams, out_dir: Path) -> GroundTruth:
    """Write a complete loadable corpus plus ground-truth.json; returns the
    ground truth. Equal params produce byte-identical output."""
    rng = random.Random(params.seed)
    tests = [f"synth.SynthSuite.t{i:03d}" for i in range(params.n_tests)]
    failing_test = tests[rng.randrange(params.n_tests)]
    exit_counts = {test: rng.randint(1, 3) for test in tests}

    ids = list(range(1, params.n_patches + 1))
    planted = rng.choice(ids)
    champion = rng.choice([pid for pid in ids if pid != planted])
    eligible = [pid for pid in ids if pid not in (planted, champion)]
    n_w = int(params.w_fraction * params.n_patches + 0.5)
    if n_w > len(eligible):
        raise InvalidParams(
            f"w_fraction {params.w_fraction} would bucket {n_w} of {params.n_patches} patches; "
            f"only {len(eligible)} are eligible (planted and top-susp patches must stay out)")
    w_set = set(rng.sample(eligible, n_w))

    planted_failing = params.edit_noise + 2
    min_int_leaves = planted_failing + 2
    base_graphs = {
        test: _random_tree(rng, rng.randint(*params.graph_size), min_int_leaves)
        for test in tests
    }
    intended = _intended_edits(params, rng, ids, planted, tests, failing_test)

    susp: dict[int, str] = {}
    for pid in ids:
        if pid == champion:
            susp[pid] = "0.9500"
        elif pid == planted:
            susp[pid] = f"{rng.uniform(0.30, 0.80):.4f}"
        else:
            susp[pid] = f"{rng.uniform(0.05, 0.90):.4f}"

    out_dir.mkdir(parents=True, exist_ok=True)
    manifest: dict[str, dict[str, dict[str, str]]] = {}
    for pid in ids:
        manifest[str(pid)] = {}
        for index, test in enumerate(tests):
            base = base_graphs[test]
            patched_graph = perturb_graph(base, intended[pid][test], rng)
            n_orig = exit_counts[test]
            n_patched = n_orig + (1 if pid in w_set and test == failing_test else 0)
            rel = {}
            for version, graph, count in (("original", base, n_orig),
                                          ("patched", patched_graph, n_patched)):
                doc = SnapshotDocument(
                    test, METHOD_NAME,
                    [Snapshot(graph, i) for i in range(count)])
                rel_path = f"snapshots/p{pid}/{version}/{index:03d}.snap"
                path = out_dir / rel_path
                path.parent.mkdir(parents=True, exist_ok=True)
                path.write_bytes(encode_snapshot_document(doc))
                rel[version] = rel_path
            manifest[str(pid)][test] = rel

    covering = " ".join(tests)
    csv_lines = ["Id,Susp,Method,Class-File,Covering-Tests"]
    csv_lines += [f"{pid},{susp[pid]},{METHOD_NAME},{CLASS_ARTIFACT},{covering}" for pid in ids]
    (out_dir / "input-file.csv").write_text("\n".join(csv_lines) + "\n", encoding="utf-8")
    (out_dir / "manifest.json").write_text(
        json.dumps({"patches": manifest}, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (out_dir / "failing-tests.txt").write_text(failing_test + "\n", encoding="utf-8")

    truth = GroundTruth(
        planted=planted,
        intended={
            pid: {test: ExtendedRational.finite(k) for test, k in per_test.items()}
            for pid, per_test in intended.items()
        },
    )
    (out_dir / GROUND_TRUTH_NAME).write_bytes(truth.to_json_bytes())
    return truth
