"""Exception hierarchy shared by all patchrank modules.

Every error raised on purpose by this package derives from PatchRankError,
so CLI entry points can catch one type and turn it into a diagnostic plus a
non-zero exit code.
"""


class PatchRankError(Exception):
    """Base class for all patchrank errors."""


# --- snapshot codec ---------------------------------------------------------

class MalformedDocument(PatchRankError):
    """Snapshot bytes are not valid UTF-8 JSON of the documented shape."""


class UnsupportedVersion(PatchRankError):
    """Snapshot document carries a format version this codec does not read."""


class InvariantViolation(PatchRankError):
    """A structural invariant of the snapshot model is broken (dangling or
    duplicate node id, node budget exceeded, non-consecutive exit indices)."""


# --- distance ---------------------------------------------------------------

class DanglingNode(PatchRankError):
    """A node id failed to resolve during graph traversal."""


class EmptySnapshotSet(PatchRankError):
    """avg_pair_distance was asked to average over an empty snapshot list."""


class LengthMismatch(PatchRankError):
    """Two per-test count vectors disagree in length."""


# --- corpus -----------------------------------------------------------------

class CorpusError(PatchRankError):
    """Base class for corpus ingestion problems."""


class MissingInputCsv(CorpusError):
    pass


class MissingManifest(CorpusError):
    pass


class MissingSnapshotFile(CorpusError):
    pass


class ManifestMismatch(CorpusError):
    """Manifest entries disagree with the patch CSV (ids or covering tests)."""


class MalformedRow(CorpusError):
    pass


class DuplicatePatchId(CorpusError):
    pass


class InvalidSusp(CorpusError):
    pass


class InvalidTestName(CorpusError):
    pass


# --- synthgen ---------------------------------------------------------------

class InvalidParams(PatchRankError):
    pass


class InsufficientLeaves(PatchRankError):
    """perturb_graph was asked for more edits than there are editable leaves."""
