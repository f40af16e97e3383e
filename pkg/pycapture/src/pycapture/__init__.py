"""pycapture: wrap a Python function and snapshot the object graphs
reachable from its arguments at every exit, in the corpus format the
ranking engine consumes."""

from .capture import ExitRecorder, install_wrapper, make_wrapper, resolve_ref
from .encode import CaptureStats, GraphBuilder, document_bytes
from .session import SessionConfig, SessionResult, TestSpec, run_capture_session

__version__ = "0.1.0"

__all__ = [
    "CaptureStats",
    "ExitRecorder",
    "GraphBuilder",
    "SessionConfig",
    "SessionResult",
    "TestSpec",
    "document_bytes",
    "install_wrapper",
    "make_wrapper",
    "resolve_ref",
    "run_capture_session",
]
