"""Object-graph snapshot model and its canonical file codec.

A snapshot document records, for one (program version, test) run, the object
graphs reachable from a method's parameters at every exit of that method.
Documents are serialized as UTF-8 JSON with a fixed key order so that
encoding is canonical: the same document always produces identical bytes.

Wire schema (format version 1):

    {"version": 1, "test": "...", "method": "...",
     "snapshots": [{"exit": 0, "roots": [0, ...],
                    "nodes": [{"id": 0, "kind": ..., ...}, ...]}, ...]}

Node payloads by kind:
    null      -> no further keys
    primitive -> "type", "value" (canonical scalar string)
    string    -> "value" (text verbatim)
    array     -> "type" (component type), "elems" (node ids)
    object    -> "type", "fields" (field name -> node id, names sorted)

Canonical scalar encodings: integers in decimal, booleans "true"/"false",
characters as decimal code point, floating point as the lowercase hex of the
IEEE-754 bit pattern (width per type name).
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Any, Iterable, Mapping

from .errors import DanglingNode, InvariantViolation, MalformedDocument, UnsupportedVersion

FORMAT_VERSION = 1
DEFAULT_NODE_BUDGET = 1_000_000


class Kind(str, Enum):
    NULL = "null"
    PRIMITIVE = "primitive"
    STRING = "string"
    ARRAY = "array"
    OBJECT = "object"


@dataclass(frozen=True)
class ObjectNode:
    """One node of a serialized object graph.

    The kind decides which payload fields are set; use the factory helpers
    (null_node, primitive_node, ...) rather than the raw constructor.
    """

    id: int
    kind: Kind
    type_name: str | None = None
    value: str | None = None
    elements: tuple[int, ...] | None = None
    fields: Mapping[str, int] | None = None

    def refs(self) -> tuple[int, ...]:
        """Node ids this node points at, in canonical traversal order."""
        if self.kind is Kind.ARRAY:
            return self.elements or ()
        if self.kind is Kind.OBJECT:
            return tuple(self.fields[name] for name in sorted(self.fields or {}))
        return ()


def null_node(node_id: int) -> ObjectNode:
    return ObjectNode(node_id, Kind.NULL)


def primitive_node(node_id: int, type_name: str, value: str) -> ObjectNode:
    return ObjectNode(node_id, Kind.PRIMITIVE, type_name=type_name, value=value)


def string_node(node_id: int, value: str) -> ObjectNode:
    return ObjectNode(node_id, Kind.STRING, value=value)


def array_node(node_id: int, component_type: str, elements: Iterable[int]) -> ObjectNode:
    return ObjectNode(node_id, Kind.ARRAY, type_name=component_type, elements=tuple(elements))


def object_node(node_id: int, type_name: str, fields: Mapping[str, int]) -> ObjectNode:
    return ObjectNode(node_id, Kind.OBJECT, type_name=type_name, fields=dict(fields))


@dataclass(frozen=True)
class ObjectGraph:
    """A set of nodes plus the ordered root ids (one per captured parameter).

    Nodes are stored sorted by ascending id, so two graphs built from the
    same node set compare equal regardless of construction order. Graphs may
    be cyclic.
    """

    nodes: tuple[ObjectNode, ...]
    roots: tuple[int, ...]

    def __init__(self, nodes: Iterable[ObjectNode], roots: Iterable[int]):
        object.__setattr__(self, "nodes", tuple(sorted(nodes, key=lambda n: n.id)))
        object.__setattr__(self, "roots", tuple(roots))

    @cached_property
    def by_id(self) -> dict[int, ObjectNode]:
        return {n.id: n for n in self.nodes}

    def node(self, node_id: int) -> ObjectNode:
        try:
            return self.by_id[node_id]
        except KeyError:
            raise DanglingNode(f"node id {node_id} does not resolve") from None


@dataclass(frozen=True)
class Snapshot:
    """One captured method exit: the reachable graph at that exit."""

    graph: ObjectGraph
    exit_index: int


@dataclass(frozen=True)
class SnapshotDocument:
    """All snapshots of one (version, method, test) run, in exit order."""

    test_name: str
    method_name: str
    snapshots: tuple[Snapshot, ...]
    format_version: int = FORMAT_VERSION

    def __init__(self, test_name: str, method_name: str,
                 snapshots: Iterable[Snapshot], format_version: int = FORMAT_VERSION):
        object.__setattr__(self, "test_name", test_name)
        object.__setattr__(self, "method_name", method_name)
        object.__setattr__(self, "snapshots", tuple(snapshots))
        object.__setattr__(self, "format_version", format_version)


# --- canonical scalar encodings ----------------------------------------------

def encode_int(value: int) -> str:
    return str(int(value))


def encode_bool(value: bool) -> str:
    return "true" if value else "false"


def encode_char(value: str) -> str:
    if len(value) != 1:
        raise ValueError("char encoding takes exactly one character")
    return str(ord(value))


def encode_f64(value: float) -> str:
    """Lowercase hex of the IEEE-754 double bit pattern (16 digits)."""
    return struct.pack(">d", value).hex()


def encode_f32(value: float) -> str:
    """Lowercase hex of the IEEE-754 single bit pattern (8 digits)."""
    return struct.pack(">f", value).hex()


# --- validation ---------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    """One broken graph invariant; node_id is None for graph-level rules."""

    rule: str
    node_id: int | None
    detail: str

    def __str__(self) -> str:
        where = f"node {self.node_id}" if self.node_id is not None else "graph"
        return f"{self.rule} at {where}: {self.detail}"


_PAYLOAD_FIELDS = {
    Kind.NULL: (False, False, False, False),
    Kind.PRIMITIVE: (True, True, False, False),
    Kind.STRING: (False, True, False, False),
    Kind.ARRAY: (True, False, True, False),
    Kind.OBJECT: (True, False, False, True),
}


def _shape_problem(node: ObjectNode) -> str | None:
    want_type, want_value, want_elems, want_fields = _PAYLOAD_FIELDS[node.kind]
    if (node.type_name is not None) != want_type:
        return "type_name presence does not match kind"
    if (node.value is not None) != want_value:
        return "value presence does not match kind"
    if (node.elements is not None) != want_elems:
        return "elements presence does not match kind"
    if (node.fields is not None) != want_fields:
        return "fields presence does not match kind"
    if want_type and not node.type_name:
        return "empty type_name"
    if node.kind is Kind.PRIMITIVE and node.value == "":
        return "empty primitive value"
    return None


def validate_graph(graph: ObjectGraph, *, node_budget: int = DEFAULT_NODE_BUDGET) -> list[Violation]:
    """Check every ObjectGraph invariant; an empty report means the graph is valid.

    Violations are data, not errors: callers decide whether to raise.
    """
    report: list[Violation] = []

    if len(graph.nodes) > node_budget:
        report.append(Violation("node-budget", None,
                                f"{len(graph.nodes)} nodes exceed budget {node_budget}"))

    seen: set[int] = set()
    for node in graph.nodes:
        if node.id < 0:
            report.append(Violation("negative-id", node.id, "node ids must be non-negative"))
        if node.id in seen:
            report.append(Violation("duplicate-id", node.id, "node id occurs more than once"))
        seen.add(node.id)

    for node in graph.nodes:
        problem = _shape_problem(node)
        if problem:
            report.append(Violation("payload-shape", node.id, problem))
        for ref in node.refs():
            if ref not in seen:
                report.append(Violation("dangling-reference", node.id,
                                        f"references missing node id {ref}"))

    for root in graph.roots:
        if root not in seen:
            report.append(Violation("dangling-root", root, "root id does not resolve"))

    # reachability from the roots (cycle-safe)
    reachable: set[int] = set()
    stack = [r for r in graph.roots if r in graph.by_id]
    while stack:
        nid = stack.pop()
        if nid in reachable:
            continue
        reachable.add(nid)
        for ref in graph.by_id[nid].refs():
            if ref in graph.by_id and ref not in reachable:
                stack.append(ref)
    for node in graph.nodes:
        if node.id not in reachable:
            report.append(Violation("unreachable-node", node.id,
                                    "node is not reachable from any root"))
    return report


# --- encoding -----------------------------------------------------------------

def _node_payload(node: ObjectNode) -> dict[str, Any]:
    payload: dict[str, Any] = {"id": node.id, "kind": node.kind.value}
    if node.kind is Kind.NULL:
        return payload
    if node.kind is Kind.PRIMITIVE:
        payload["type"] = node.type_name
        payload["value"] = node.value
        return payload
    if node.kind is Kind.STRING:
        payload["value"] = node.value
        return payload
    if node.kind is Kind.ARRAY:
        payload["type"] = node.type_name
        payload["elems"] = list(node.elements or ())
        return payload
    payload["type"] = node.type_name
    payload["fields"] = {name: (node.fields or {})[name] for name in sorted(node.fields or {})}
    return payload


def encode_snapshot_document(doc: SnapshotDocument, *,
                             node_budget: int = DEFAULT_NODE_BUDGET) -> bytes:
    """Serialize a document to its canonical bytes.

    Raises InvariantViolation for dangling references or graphs over the node
    budget; other invariants are assumed satisfied (use validate_graph to
    audit arbitrary graphs first).
    """
    snapshots = []
    for snap in doc.snapshots:
        graph = snap.graph
        if len(graph.nodes) > node_budget:
            raise InvariantViolation(
                f"exit {snap.exit_index}: {len(graph.nodes)} nodes exceed budget {node_budget}")
        ids = graph.by_id
        for node in graph.nodes:
            if _shape_problem(node):
                raise InvariantViolation(
                    f"exit {snap.exit_index}: node {node.id}: {_shape_problem(node)}")
            for ref in node.refs():
                if ref not in ids:
                    raise InvariantViolation(
                        f"exit {snap.exit_index}: node {node.id} references missing id {ref}")
        for root in graph.roots:
            if root not in ids:
                raise InvariantViolation(
                    f"exit {snap.exit_index}: root {root} does not resolve")
        snapshots.append({
            "exit": snap.exit_index,
            "roots": list(graph.roots),
            "nodes": [_node_payload(n) for n in graph.nodes],
        })
    payload = {
        "version": doc.format_version,
        "test": doc.test_name,
        "method": doc.method_name,
        "snapshots": snapshots,
    }
    return (json.dumps(payload, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


# --- decoding -----------------------------------------------------------------

def _no_duplicate_keys(pairs: list[tuple[str, Any]]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, value in pairs:
        if key in out:
            raise MalformedDocument(f"duplicate key {key!r}")
        out[key] = value
    return out


def _as_int(value: Any, what: str) -> int:
    # bool is an int subclass; the wire format never uses JSON booleans here
    if isinstance(value, bool) or not isinstance(value, int):
        raise MalformedDocument(f"{what} must be an integer, got {value!r}")
    return value


def _as_str(value: Any, what: str) -> str:
    if not isinstance(value, str):
        raise MalformedDocument(f"{what} must be a string, got {value!r}")
    return value


def _exact_keys(obj: Mapping[str, Any], required: set[str], what: str) -> None:
    got = set(obj)
    if got != required:
        missing = required - got
        extra = got - required
        parts = []
        if missing:
            parts.append(f"missing {sorted(missing)}")
        if extra:
            parts.append(f"unexpected {sorted(extra)}")
        raise MalformedDocument(f"{what}: " + ", ".join(parts))


_NODE_KEYS = {
    "null": {"id", "kind"},
    "primitive": {"id", "kind", "type", "value"},
    "string": {"id", "kind", "value"},
    "array": {"id", "kind", "type", "elems"},
    "object": {"id", "kind", "type", "fields"},
}


def _decode_node(raw: Any) -> ObjectNode:
    if not isinstance(raw, dict):
        raise MalformedDocument(f"node must be an object, got {raw!r}")
    kind_name = _as_str(raw.get("kind"), "node kind") if "kind" in raw else None
    if kind_name not in _NODE_KEYS:
        raise MalformedDocument(f"unknown node kind {kind_name!r}")
    _exact_keys(raw, _NODE_KEYS[kind_name], f"{kind_name} node")
    node_id = _as_int(raw["id"], "node id")
    if node_id < 0:
        raise MalformedDocument(f"node id {node_id} is negative")
    if kind_name == "null":
        return null_node(node_id)
    if kind_name == "primitive":
        type_name = _as_str(raw["type"], "primitive type")
        value = _as_str(raw["value"], "primitive value")
        if not type_name or not value:
            raise MalformedDocument(f"node {node_id}: empty primitive type or value")
        return primitive_node(node_id, type_name, value)
    if kind_name == "string":
        return string_node(node_id, _as_str(raw["value"], "string value"))
    if kind_name == "array":
        type_name = _as_str(raw["type"], "array component type")
        if not type_name:
            raise MalformedDocument(f"node {node_id}: empty array component type")
        elems = raw["elems"]
        if not isinstance(elems, list):
            raise MalformedDocument(f"node {node_id}: elems must be a list")
        return array_node(node_id, type_name, [_as_int(e, "element id") for e in elems])
    type_name = _as_str(raw["type"], "object type")
    if not type_name:
        raise MalformedDocument(f"node {node_id}: empty object type")
    fields = raw["fields"]
    if not isinstance(fields, dict):
        raise MalformedDocument(f"node {node_id}: fields must be an object")
    return object_node(node_id, type_name,
                       {name: _as_int(ref, f"field {name!r}") for name, ref in fields.items()})


def _decode_snapshot(raw: Any, *, node_budget: int) -> Snapshot:
    if not isinstance(raw, dict):
        raise MalformedDocument(f"snapshot must be an object, got {raw!r}")
    _exact_keys(raw, {"exit", "roots", "nodes"}, "snapshot")
    exit_index = _as_int(raw["exit"], "exit index")
    if exit_index < 0:
        raise MalformedDocument(f"exit index {exit_index} is negative")
    roots_raw = raw["roots"]
    nodes_raw = raw["nodes"]
    if not isinstance(roots_raw, list) or not isinstance(nodes_raw, list):
        raise MalformedDocument("snapshot roots and nodes must be lists")
    nodes = [_decode_node(n) for n in nodes_raw]
    if len(nodes) > node_budget:
        raise InvariantViolation(
            f"exit {exit_index}: {len(nodes)} nodes exceed budget {node_budget}")
    ids: set[int] = set()
    for node in nodes:
        if node.id in ids:
            raise InvariantViolation(f"exit {exit_index}: duplicate node id {node.id}")
        ids.add(node.id)
    roots = [_as_int(r, "root id") for r in roots_raw]
    for root in roots:
        if root not in ids:
            raise InvariantViolation(f"exit {exit_index}: root {root} does not resolve")
    for node in nodes:
        for ref in node.refs():
            if ref not in ids:
                raise InvariantViolation(
                    f"exit {exit_index}: node {node.id} references missing id {ref}")
    return Snapshot(graph=ObjectGraph(nodes, roots), exit_index=exit_index)


def decode_snapshot_document(data: bytes | str, *,
                             node_budget: int = DEFAULT_NODE_BUDGET) -> SnapshotDocument:
    """Parse snapshot bytes; returns the document or raises a typed error.

    Decoding is total: arbitrary input yields MalformedDocument,
    UnsupportedVersion, or InvariantViolation rather than a crash, and never
    a partially built document.
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedDocument(f"not valid UTF-8: {exc}") from None
    else:
        text = data
    try:
        raw = json.loads(text, object_pairs_hook=_no_duplicate_keys)
    except MalformedDocument:
        raise
    except (ValueError, RecursionError) as exc:
        raise MalformedDocument(f"not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise MalformedDocument("top level must be an object")
    _exact_keys(raw, {"version", "test", "method", "snapshots"}, "document")
    version = _as_int(raw["version"], "version")
    if version != FORMAT_VERSION:
        raise UnsupportedVersion(f"format version {version} is not supported (expected 1)")
    test_name = _as_str(raw["test"], "test")
    method_name = _as_str(raw["method"], "method")
    if not test_name:
        raise InvariantViolation("test name must be non-empty")
    snaps_raw = raw["snapshots"]
    if not isinstance(snaps_raw, list):
        raise MalformedDocument("snapshots must be a list")
    snapshots = [_decode_snapshot(s, node_budget=node_budget) for s in snaps_raw]
    for position, snap in enumerate(snapshots):
        if snap.exit_index != position:
            raise InvariantViolation(
                f"exit indices must be consecutive from 0; found {snap.exit_index} "
                f"at position {position}")
    return SnapshotDocument(test_name, method_name, snapshots, format_version=version)
