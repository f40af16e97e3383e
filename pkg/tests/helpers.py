"""Shared test utilities: independent oracles and seeded graph generators.

The oracles here are deliberately written from the definitions (plain
recursion over sequence suffixes) and never call into the implementations
they check.
"""

from __future__ import annotations

import random
from functools import cache
from pathlib import Path

from patchrank.objgraph import (
    ObjectGraph,
    Snapshot,
    SnapshotDocument,
    array_node,
    encode_bool,
    encode_f64,
    encode_snapshot_document,
    null_node,
    object_node,
    primitive_node,
    string_node,
)


@cache
def lev_oracle(a: str, b: str) -> int:
    """Exhaustive recursive edit distance for strings (memoized on suffixes)."""
    if not a:
        return len(b)
    if not b:
        return len(a)
    best = lev_oracle(a[1:], b[1:]) + (a[0] != b[0])
    alt = lev_oracle(a[1:], b) + 1
    if alt < best:
        best = alt
    alt = lev_oracle(a, b[1:]) + 1
    if alt < best:
        best = alt
    return best


def edit_script_oracle(a, b, equal=None) -> int:
    """Plain exponential edit-script enumeration; only for short sequences."""
    eq = equal if equal is not None else (lambda x, y: x == y)

    def go(i: int, j: int) -> int:
        if i == len(a):
            return len(b) - j
        if j == len(b):
            return len(a) - i
        best = go(i + 1, j + 1) + (0 if eq(a[i], b[j]) else 1)
        alt = go(i + 1, j) + 1
        if alt < best:
            best = alt
        alt = go(i, j + 1) + 1
        if alt < best:
            best = alt
        return best

    return go(0, 0)


# --- graph fixtures ---------------------------------------------------------

def int_leaf_graph(value: int) -> ObjectGraph:
    return ObjectGraph([primitive_node(0, "int", str(value))], roots=(0,))


def fields_graph(values: dict[str, int], type_name: str = "demo.Acc") -> ObjectGraph:
    """Object with int-valued fields; distance between two of these is the
    number of differing fields."""
    nodes = [object_node(0, type_name, {name: i + 1 for i, name in enumerate(values)})]
    for i, value in enumerate(values.values()):
        nodes.append(primitive_node(i + 1, "int", str(value)))
    return ObjectGraph(nodes, roots=(0,))


def int_array_graph(values: list[int]) -> ObjectGraph:
    nodes = [array_node(0, "int", range(1, len(values) + 1))]
    for i, value in enumerate(values):
        nodes.append(primitive_node(i + 1, "int", str(value)))
    return ObjectGraph(nodes, roots=(0,))


def string_graph(text: str) -> ObjectGraph:
    return ObjectGraph([string_node(0, text)], roots=(0,))


def two_node_cycle(type_a: str = "T.A", type_b: str = "T.B") -> ObjectGraph:
    """A.f -> B, B.g -> A."""
    return ObjectGraph(
        [object_node(0, type_a, {"f": 1}), object_node(1, type_b, {"g": 0})],
        roots=(0,))


def snapshot_of(graph: ObjectGraph, exit_index: int = 0) -> Snapshot:
    return Snapshot(graph=graph, exit_index=exit_index)


# --- random graphs ----------------------------------------------------------

_PRIM_TYPES = ("int", "boolean", "double")
_OBJ_TYPES = ("gen.A", "gen.B", "gen.C")
_STRINGS = ("", "a", "ab", "ba", "abc", "xyzzy")


def random_graph(rng: random.Random, *, max_nodes: int = 18, max_depth: int = 8,
                 cycles: bool = True) -> ObjectGraph:
    """A valid random graph: every node reachable from the root, optional
    back/cross edges (including self loops) when cycles=True."""
    n = rng.randint(1, max_nodes)
    kinds: dict[int, str] = {0: "object"}
    object_fields: dict[int, dict[str, int]] = {0: {}}
    array_elems: dict[int, list[int]] = {}
    values: dict[int, tuple[str, str]] = {}
    strings: dict[int, str] = {}
    depth: dict[int, int] = {0: 0}
    containers = [0]

    def attach(parent: int, child: int) -> None:
        if kinds[parent] == "object":
            object_fields[parent][f"k{child:02d}"] = child
        else:
            array_elems[parent].append(child)

    for nid in range(1, n):
        open_parents = [c for c in containers if depth[c] < max_depth]
        if not open_parents:
            break
        parent = rng.choice(open_parents)
        roll = rng.random()
        if roll < 0.25:
            kinds[nid] = "object"
            object_fields[nid] = {}
            containers.append(nid)
        elif roll < 0.40:
            kinds[nid] = "array"
            array_elems[nid] = []
            containers.append(nid)
        elif roll < 0.70:
            kinds[nid] = "primitive"
            ptype = rng.choice(_PRIM_TYPES)
            if ptype == "int":
                values[nid] = (ptype, str(rng.randrange(-5, 50)))
            elif ptype == "boolean":
                values[nid] = (ptype, encode_bool(rng.random() < 0.5))
            else:
                values[nid] = (ptype, encode_f64(rng.uniform(-4.0, 4.0)))
        elif roll < 0.85:
            kinds[nid] = "string"
            strings[nid] = rng.choice(_STRINGS)
        else:
            kinds[nid] = "null"
        depth[nid] = depth[parent] + 1
        attach(parent, nid)

    made = sorted(kinds)
    if cycles:
        for nid in made:
            if kinds[nid] == "object" and rng.random() < 0.3:
                object_fields[nid][f"x{nid:02d}"] = rng.choice(made)

    nodes = []
    for nid in made:
        kind = kinds[nid]
        if kind == "object":
            nodes.append(object_node(nid, rng.choice(_OBJ_TYPES), object_fields[nid]))
        elif kind == "array":
            nodes.append(array_node(nid, "gen.E", array_elems[nid]))
        elif kind == "primitive":
            ptype, value = values[nid]
            nodes.append(primitive_node(nid, ptype, value))
        elif kind == "string":
            nodes.append(string_node(nid, strings[nid]))
        else:
            nodes.append(null_node(nid))
    return ObjectGraph(nodes, roots=(0,))


def mutate_values(graph: ObjectGraph, rng: random.Random) -> ObjectGraph:
    """A structural twin with some leaf values changed; kinds and types are
    preserved so distances stay finite."""
    from patchrank.objgraph import Kind

    nodes = []
    for node in graph.nodes:
        if node.kind is Kind.PRIMITIVE and rng.random() < 0.4:
            if node.type_name == "int":
                nodes.append(primitive_node(node.id, "int", str(int(node.value) + rng.randint(1, 9))))
            elif node.type_name == "boolean":
                nodes.append(primitive_node(node.id, "boolean",
                                            "false" if node.value == "true" else "true"))
            else:
                nodes.append(primitive_node(node.id, node.type_name,
                                            encode_f64(rng.uniform(-4.0, 4.0))))
        elif node.kind is Kind.STRING and rng.random() < 0.4:
            nodes.append(string_node(node.id, rng.choice(_STRINGS)))
        else:
            nodes.append(node)
    return ObjectGraph(nodes, graph.roots)


# --- corpus building --------------------------------------------------------

def write_doc(path: Path, test: str, method: str, graphs: list[ObjectGraph]) -> None:
    doc = SnapshotDocument(test, method, [Snapshot(g, i) for i, g in enumerate(graphs)])
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_snapshot_document(doc))


def write_corpus(root: Path, csv_rows: list[str],
                 docs: dict[tuple[int, str, str], tuple[str, list[ObjectGraph]]],
                 failing: list[str] | None = None) -> None:
    """Write a corpus directory from explicit parts.

    docs maps (patch_id, test, version) to (method, graphs); manifest paths
    are derived as snapshots/p<ID>/<version>/<n>.snap in insertion order.
    """
    import json

    root.mkdir(parents=True, exist_ok=True)
    header = "Id,Susp,Method,Class-File,Covering-Tests"
    (root / "input-file.csv").write_text("\n".join([header] + csv_rows) + "\n", encoding="utf-8")
    manifest: dict[str, dict[str, dict[str, str]]] = {}
    counters: dict[tuple[int, str], int] = {}
    for (pid, test, version), (method, graphs) in docs.items():
        index = counters.setdefault((pid, version), 0)
        counters[(pid, version)] = index + 1
        rel = f"snapshots/p{pid}/{version}/{index:03d}.snap"
        write_doc(root / rel, test, method, graphs)
        manifest.setdefault(str(pid), {}).setdefault(test, {})[version] = rel
    (root / "manifest.json").write_text(
        json.dumps({"patches": manifest}, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    if failing:
        (root / "failing-tests.txt").write_text("\n".join(failing) + "\n", encoding="utf-8")
