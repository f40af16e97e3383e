"""Function wrapping: record the object graphs reachable from the arguments
at every exit of the wrapped callable, normal or exceptional.

The wrapper never changes the target's behavior: the call result and any
exception pass through untouched, and errors inside the capture itself are
swallowed into the diagnostics instead of leaking into the call.
"""

from __future__ import annotations

import functools
import importlib
import inspect
from typing import Any, Callable

from .encode import CaptureStats, GraphBuilder, snapshot_payload


def resolve_ref(ref: str) -> tuple[Any, Any, str, Any]:
    """Resolve "module:attr" or "module:Outer.inner" to
    (module, owner, attribute name, value)."""
    module_name, sep, attr_path = ref.partition(":")
    if not sep or not module_name or not attr_path:
        raise ValueError(f"reference {ref!r} must look like module:attribute")
    module = importlib.import_module(module_name)
    owner: Any = module
    value: Any = module
    parts = attr_path.split(".")
    for part in parts:
        owner = value
        value = getattr(value, part)
    return module, owner, parts[-1], value


class ExitRecorder:
    """Accumulates one snapshot per exit of the wrapped callable."""

    def __init__(self, *, max_depth: int, node_budget: int):
        self.max_depth = max_depth
        self.node_budget = node_budget
        self.snapshots: list[dict] = []
        self.stats = CaptureStats()

    def record_exit(self, values: list[Any]) -> None:
        builder = GraphBuilder(max_depth=self.max_depth, node_budget=self.node_budget,
                               stats=self.stats)
        roots = [builder.add(value) for value in values]
        self.snapshots.append(snapshot_payload(len(self.snapshots), roots, builder.nodes))


def _parameter_values(sig: inspect.Signature | None, args: tuple, kwargs: dict) -> list[Any]:
    """One root per parameter, in declaration order (receiver first for
    methods); falls back to call order if the signature cannot bind."""
    if sig is not None:
        try:
            bound = sig.bind(*args, **kwargs)
            bound.apply_defaults()
            return list(bound.arguments.values())
        except TypeError:
            pass
    return list(args) + [kwargs[key] for key in sorted(kwargs)]


def make_wrapper(impl: Callable, recorder: ExitRecorder) -> Callable:
    try:
        sig = inspect.signature(impl)
    except (TypeError, ValueError):
        sig = None

    @functools.wraps(impl)
    def wrapper(*args, **kwargs):
        try:
            return impl(*args, **kwargs)
        finally:
            try:
                recorder.record_exit(_parameter_values(sig, args, kwargs))
            except Exception as exc:  # capture must never alter the call
                recorder.stats.capture_errors.append(repr(exc))

    return wrapper


def install_wrapper(target: str, impl: Callable, recorder: ExitRecorder) -> Callable:
    """Wrap `impl` and install it under the target's name; returns the
    original attribute value so callers can restore it."""
    _, owner, attr, original = resolve_ref(target)
    setattr(owner, attr, make_wrapper(impl, recorder))
    return original
