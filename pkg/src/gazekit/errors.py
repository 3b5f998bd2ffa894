"""The package's error taxonomy.

Every raisable condition has a named class so callers (CLI, HTTP layer,
tests) can branch on type instead of message text.  Parse-time errors carry
the 1-based line number of the offending row.
"""

from __future__ import annotations

__all__ = [
    "AlphabetMismatch",
    "DataDirUnwritable",
    "DegenerateShape",
    "EmptyFile",
    "EmptyInput",
    "EmptySelection",
    "EmptyWindow",
    "GazekitError",
    "GeometryMismatch",
    "InvertedWindow",
    "MalformedJson",
    "MalformedRow",
    "MissingFile",
    "MixedMetric",
    "NegativeGid",
    "NonMonotoneTime",
    "PortInUse",
    "RecomputationMismatch",
    "SchemaMismatch",
    "UnknownFocusAoi",
    "UnknownId",
    "UnknownScopeTarget",
    "UnsupportedCombination",
]


class GazekitError(Exception):
    """Base class for all errors raised by this package."""


class _LineError(GazekitError):
    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class MalformedRow(_LineError):
    """Wrong field count or unparseable number in a TSV row."""


class NonMonotoneTime(_LineError):
    """Timestamp not strictly greater than its predecessor."""


class InvertedWindow(_LineError):
    """Time window whose end does not come after its start."""


class EmptyFile(GazekitError):
    pass


class MalformedJson(GazekitError):
    pass


class NegativeGid(GazekitError):
    pass


class EmptyWindow(GazekitError):
    """Dispersion asked of an empty point window."""


class EmptyInput(GazekitError):
    pass


class EmptySelection(GazekitError):
    pass


class UnknownFocusAoi(GazekitError):
    pass


class UnknownId(GazekitError):
    pass


class UnknownScopeTarget(GazekitError):
    pass


class DegenerateShape(GazekitError):
    pass


class AlphabetMismatch(GazekitError):
    pass


class GeometryMismatch(GazekitError):
    pass


class MixedMetric(GazekitError):
    pass


class UnsupportedCombination(GazekitError):
    def __init__(self, row_dim: str, col_dim: str, metric_id: str):
        self.row_dim = row_dim
        self.col_dim = col_dim
        self.metric_id = metric_id
        super().__init__(f"unsupported matrix combination: {row_dim} x {col_dim} with metric {metric_id!r}")


class PathError(GazekitError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class MissingFile(PathError):
    def __init__(self, path: str):
        super().__init__(path, "required bundle member missing")


class SchemaMismatch(PathError):
    pass


class RecomputationMismatch(UserWarning):
    """Imported derived file disagrees with recomputation from raw points.

    A warning, not an error: raw gaze points are authoritative, so the
    import proceeds on recomputed values.
    """


class PortInUse(GazekitError):
    pass


class DataDirUnwritable(GazekitError):
    pass
