"""Recursive object-graph distance, generalized to cyclic graphs.

The distance between two nodes is computed by case analysis on their kinds:
equal nulls and equal primitives cost 0, unequal primitives of the same type
cost 1, strings cost their Levenshtein distance over code points, arrays of
the same component type cost a Levenshtein distance whose element equality
is "recursive distance is zero", objects of the same type cost the sum of
their field distances, and any kind or type mismatch costs +infinity.

Cycles are cut off by a set of node-id pairs currently on the comparison
stack: revisiting an in-progress pair contributes 0. That makes the
traversal terminate on arbitrary graphs and keeps dist(x, x) == 0 even when
x is cyclic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Any, Callable, Sequence

from .errors import EmptySnapshotSet
from .objgraph import Kind, ObjectGraph, Snapshot

U64_MAX = 2**64 - 1

PairMemo = set[tuple[int, int]]


@total_ordering
@dataclass(frozen=True)
class ExtendedDistance:
    """A non-negative integer distance extended with +infinity.

    Finite values are exact and saturate at U64_MAX under addition; the
    infinite value is strictly greater than every finite one and absorbs
    addition.
    """

    _value: int | None  # None encodes infinity

    @classmethod
    def finite(cls, value: int) -> "ExtendedDistance":
        if value < 0:
            raise ValueError("distances are non-negative")
        return cls(min(value, U64_MAX))

    @property
    def is_finite(self) -> bool:
        return self._value is not None

    @property
    def value(self) -> int:
        if self._value is None:
            raise ValueError("infinite distance has no finite value")
        return self._value

    def __add__(self, other: "ExtendedDistance") -> "ExtendedDistance":
        if self._value is None or other._value is None:
            return INFINITE_DISTANCE
        return ExtendedDistance(min(self._value + other._value, U64_MAX))

    def __lt__(self, other: "ExtendedDistance") -> bool:
        if self._value is None:
            return False
        if other._value is None:
            return True
        return self._value < other._value

    def __str__(self) -> str:
        return "inf" if self._value is None else str(self._value)


INFINITE_DISTANCE = ExtendedDistance(None)
ZERO_DISTANCE = ExtendedDistance(0)
ONE_DISTANCE = ExtendedDistance(1)


@total_ordering
@dataclass(frozen=True)
class ExtendedRational:
    """An exact non-negative rational extended with +infinity.

    Comparison is exact (Fraction arithmetic, i.e. cross-multiplication);
    str() yields "numerator/denominator" in lowest terms, or "inf".
    """

    _value: Fraction | None

    @classmethod
    def finite(cls, numerator: int, denominator: int = 1) -> "ExtendedRational":
        if denominator <= 0:
            raise ValueError("denominator must be positive")
        if numerator < 0:
            raise ValueError("distances are non-negative")
        return cls(Fraction(numerator, denominator))

    @classmethod
    def from_fraction(cls, value: Fraction) -> "ExtendedRational":
        if value < 0:
            raise ValueError("distances are non-negative")
        return cls(value)

    @classmethod
    def parse(cls, text: str) -> "ExtendedRational":
        if text == "inf":
            return INFINITE_RATIONAL
        return cls(Fraction(text))

    @property
    def is_finite(self) -> bool:
        return self._value is not None

    @property
    def fraction(self) -> Fraction:
        if self._value is None:
            raise ValueError("infinite value has no fraction")
        return self._value

    def __lt__(self, other: "ExtendedRational") -> bool:
        if self._value is None:
            return False
        if other._value is None:
            return True
        return self._value < other._value

    def __str__(self) -> str:
        if self._value is None:
            return "inf"
        return f"{self._value.numerator}/{self._value.denominator}"


INFINITE_RATIONAL = ExtendedRational(None)


# --- Levenshtein ----------------------------------------------------------------

_fast_lev: Any = False  # False = not probed yet, None = unavailable


def _fast_path():
    global _fast_lev
    if _fast_lev is False:
        try:
            from ._fastlev import lev_ascii
        except ImportError:
            lev_ascii = None
        _fast_lev = lev_ascii
    return _fast_lev


def levenshtein(a: Sequence, b: Sequence,
                equal: Callable[[Any, Any], bool] | None = None) -> int:
    """Minimum number of unit-cost insertions, deletions and substitutions
    transforming a into b.

    Element equality defaults to ==; pass `equal` to supply an oracle (used
    by the array rule, where equality means "recursive distance is zero").
    ASCII strings compared with default equality take a jitted fast path.
    """
    if (equal is None and isinstance(a, str) and isinstance(b, str)
            and a.isascii() and b.isascii()):
        fast = _fast_path()
        if fast is not None:
            return int(fast(a.encode("ascii"), b.encode("ascii")))
    m, n = len(a), len(b)
    if m == 0:
        return n
    if n == 0:
        return m
    prev = list(range(n + 1))
    for i in range(1, m + 1):
        ai = a[i - 1]
        cur = [i]
        append = cur.append
        left = i
        for j in range(1, n + 1):
            same = (ai == b[j - 1]) if equal is None else equal(ai, b[j - 1])
            best = prev[j - 1] + (0 if same else 1)
            dele = prev[j] + 1
            if dele < best:
                best = dele
            ins = left + 1
            if ins < best:
                best = ins
            append(best)
            left = best
        prev = cur
    return prev[n]


# --- node / snapshot distance -----------------------------------------------------

def node_dist(g1: ObjectGraph, n1: int, g2: ObjectGraph, n2: int,
              memo: PairMemo | None = None) -> ExtendedDistance:
    """Distance between node n1 of g1 and node n2 of g2.

    `memo` holds the (left, right) pairs currently being compared; leave it
    None at the top level. Raises DanglingNode if an id fails to resolve.
    """
    if memo is None:
        memo = set()
    pair = (n1, n2)
    if pair in memo:
        return ZERO_DISTANCE
    a = g1.node(n1)
    b = g2.node(n2)
    ka, kb = a.kind, b.kind
    if ka is Kind.NULL and kb is Kind.NULL:
        return ZERO_DISTANCE
    if ka is Kind.NULL or kb is Kind.NULL:
        return ONE_DISTANCE
    if ka is not kb:
        return INFINITE_DISTANCE
    if ka is Kind.PRIMITIVE:
        if a.type_name != b.type_name:
            return INFINITE_DISTANCE
        return ZERO_DISTANCE if a.value == b.value else ONE_DISTANCE
    if ka is Kind.STRING:
        return ExtendedDistance.finite(levenshtein(a.value or "", b.value or ""))
    if ka is Kind.ARRAY:
        if a.type_name != b.type_name:
            return INFINITE_DISTANCE
        memo.add(pair)
        try:
            def elements_equal(x: int, y: int) -> bool:
                return node_dist(g1, x, g2, y, memo) == ZERO_DISTANCE

            return ExtendedDistance.finite(
                levenshtein(a.elements or (), b.elements or (), elements_equal))
        finally:
            memo.discard(pair)
    # objects
    if a.type_name != b.type_name:
        return INFINITE_DISTANCE
    memo.add(pair)
    try:
        fields_a = a.fields or {}
        fields_b = b.fields or {}
        total = ZERO_DISTANCE
        for name in sorted(set(fields_a) | set(fields_b)):
            if name not in fields_a or name not in fields_b:
                # one-sided field: adapter bug tolerated at unit cost
                total = total + ONE_DISTANCE
            else:
                total = total + node_dist(g1, fields_a[name], g2, fields_b[name], memo)
            if not total.is_finite:
                return INFINITE_DISTANCE
        return total
    finally:
        memo.discard(pair)


def snapshot_dist(s1: Snapshot, s2: Snapshot) -> ExtendedDistance:
    """Distance between two snapshots: the sum over positionally paired roots,
    or +infinity when the root arities differ."""
    r1, r2 = s1.graph.roots, s2.graph.roots
    if len(r1) != len(r2):
        return INFINITE_DISTANCE
    total = ZERO_DISTANCE
    for a, b in zip(r1, r2):
        total = total + node_dist(s1.graph, a, s2.graph, b, set())
        if not total.is_finite:
            return INFINITE_DISTANCE
    return total


def avg_pair_distance(originals: Sequence[Snapshot],
                      patched: Sequence[Snapshot]) -> ExtendedRational:
    """Exact mean of snapshot_dist over the full cross product of the two
    snapshot lists; +infinity absorbs."""
    if not originals or not patched:
        raise EmptySnapshotSet("both snapshot lists must be non-empty")
    total = 0
    for a in originals:
        for b in patched:
            d = snapshot_dist(a, b)
            if not d.is_finite:
                return INFINITE_RATIONAL
            total += d.value
    return ExtendedRational.from_fraction(Fraction(total, len(originals) * len(patched)))
