"""Object-graph encoder: Python values to snapshot-format node lists.

Emits the runtime-agnostic snapshot schema (format version 1) without any
dependency on the ranking engine; conformance is checked against the
engine's `validate` command in the acceptance tests.

Mapping rules: None -> null node; bool/int/float -> primitive nodes with
canonical values (bool as "true"/"false", int in decimal, float as the
lowercase hex of its IEEE-754 bit pattern); str -> string node; bytes ->
array of "byte" primitives; list/tuple -> array node whose component type is
the single element type name, or "mixed"; set/frozenset -> array with
elements in repr-sorted order; dict -> object node keyed by the dict's own
keys when they are all strings, otherwise an array of "dict.entry" pair
objects; anything else -> object node keyed by attribute name. Shared
substructure and cycles become shared node ids. Structure deeper than
max_depth (or beyond the node budget) is replaced by a shared null node and
counted.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from typing import Any

FORMAT_VERSION = 1
DEFAULT_MAX_DEPTH = 12
DEFAULT_NODE_BUDGET = 100_000
MIXED_COMPONENT = "mixed"


def encode_float(value: float) -> str:
    return struct.pack(">d", value).hex()


def encode_bool(value: bool) -> str:
    return "true" if value else "false"


@dataclass
class CaptureStats:
    truncated: int = 0
    budget_hits: int = 0
    capture_errors: list[str] = field(default_factory=list)

    def merge(self, other: "CaptureStats") -> None:
        self.truncated += other.truncated
        self.budget_hits += other.budget_hits
        self.capture_errors.extend(other.capture_errors)


class GraphBuilder:
    """Builds one snapshot's node list; use a fresh builder per exit."""

    def __init__(self, *, max_depth: int = DEFAULT_MAX_DEPTH,
                 node_budget: int = DEFAULT_NODE_BUDGET,
                 stats: CaptureStats | None = None):
        self.max_depth = max_depth
        self.node_budget = node_budget
        self.stats = stats if stats is not None else CaptureStats()
        self.nodes: list[dict[str, Any]] = []
        self._memo: dict[int, int] = {}
        self._shared_null: int | None = None

    def _new_node(self) -> dict[str, Any]:
        node: dict[str, Any] = {"id": len(self.nodes)}
        self.nodes.append(node)
        return node

    def _null_placeholder(self) -> int:
        if self._shared_null is None:
            node = self._new_node()
            node["kind"] = "null"
            self._shared_null = node["id"]
        return self._shared_null

    def add(self, obj: Any, depth: int = 0) -> int:
        """Encode obj (and everything reachable from it) and return its node id."""
        known = self._memo.get(id(obj))
        if known is not None:
            return known
        if len(self.nodes) >= self.node_budget - 1:
            self.stats.budget_hits += 1
            return self._null_placeholder()
        if depth > self.max_depth:
            self.stats.truncated += 1
            return self._null_placeholder()

        if obj is None:
            node = self._new_node()
            node["kind"] = "null"
            return node["id"]
        if isinstance(obj, bool):
            return self._primitive("bool", encode_bool(obj))
        if isinstance(obj, int):
            return self._primitive("int", str(obj))
        if isinstance(obj, float):
            return self._primitive("float", encode_float(obj))
        if isinstance(obj, str):
            node = self._new_node()
            node["kind"] = "string"
            node["value"] = obj
            return node["id"]
        if isinstance(obj, (bytes, bytearray)):
            node = self._new_node()
            self._memo[id(obj)] = node["id"]
            node["kind"] = "array"
            node["type"] = "byte"
            node["elems"] = [self._primitive("byte", str(b)) for b in obj]
            return node["id"]
        if isinstance(obj, (list, tuple)):
            return self._sequence(obj, list(obj), depth)
        if isinstance(obj, (set, frozenset)):
            return self._sequence(obj, sorted(obj, key=repr), depth)
        if isinstance(obj, dict):
            return self._mapping(obj, depth)
        return self._object(obj, depth)

    def _primitive(self, type_name: str, value: str) -> int:
        node = self._new_node()
        node["kind"] = "primitive"
        node["type"] = type_name
        node["value"] = value
        return node["id"]

    def _sequence(self, obj: Any, items: list, depth: int) -> int:
        node = self._new_node()
        self._memo[id(obj)] = node["id"]
        node["kind"] = "array"
        element_types = {type(item).__name__ for item in items}
        node["type"] = element_types.pop() if len(element_types) == 1 else MIXED_COMPONENT
        node["elems"] = [self.add(item, depth + 1) for item in items]
        return node["id"]

    def _mapping(self, obj: dict, depth: int) -> int:
        node = self._new_node()
        self._memo[id(obj)] = node["id"]
        if all(isinstance(key, str) for key in obj):
            node["kind"] = "object"
            node["type"] = "dict"
            node["fields"] = {key: self.add(obj[key], depth + 1) for key in sorted(obj)}
            return node["id"]
        node["kind"] = "array"
        node["type"] = "dict.entry"
        elems = []
        for key, value in obj.items():
            entry = self._new_node()
            entry["kind"] = "object"
            entry["type"] = "dict.entry"
            entry["fields"] = {"key": self.add(key, depth + 1),
                               "value": self.add(value, depth + 1)}
            elems.append(entry["id"])
        node["elems"] = elems
        return node["id"]

    def _object(self, obj: Any, depth: int) -> int:
        node = self._new_node()
        self._memo[id(obj)] = node["id"]
        node["kind"] = "object"
        cls = type(obj)
        node["type"] = f"{cls.__module__}.{cls.__qualname__}"
        attrs: dict[str, Any] = {}
        if hasattr(obj, "__dict__"):
            attrs.update(vars(obj))
        for klass in cls.__mro__:
            for slot in getattr(klass, "__slots__", ()):
                if isinstance(slot, str) and hasattr(obj, slot):
                    attrs.setdefault(slot, getattr(obj, slot))
        node["fields"] = {name: self.add(value, depth + 1)
                          for name, value in sorted(attrs.items())}
        return node["id"]


def snapshot_payload(exit_index: int, roots: list[int], nodes: list[dict]) -> dict:
    return {"exit": exit_index, "roots": roots, "nodes": nodes}


def document_bytes(test_name: str, method_name: str, snapshots: list[dict]) -> bytes:
    payload = {
        "version": FORMAT_VERSION,
        "test": test_name,
        "method": method_name,
        "snapshots": snapshots,
    }
    return (json.dumps(payload, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
