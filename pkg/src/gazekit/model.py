"""Core data model: samples, fixations, saccades, AOIs, TWIs, scopes, grids.

Everything downstream (detection, metrics, similarity, the service layer)
speaks in these types.  Timestamps are milliseconds; spatial values are in
stimulus units (pixels for screen recordings, but nothing here assumes that).
All record types are immutable; "editing" a session produces a new snapshot.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import DegenerateShape, InvertedWindow, NegativeGid, UnknownId

__all__ = [
    "ALL_SAMPLES",
    "Aoi",
    "DensityGrid",
    "Dim",
    "Fixation",
    "GazeSample",
    "GroupTable",
    "MetricMatrix",
    "MetricValue",
    "Polygon",
    "Rect",
    "Saccade",
    "Scope",
    "Selector",
    "Twi",
    "ValidationReport",
    "dataset_validate",
    "fmt_num",
]

# Sentinel sample_id for TWIs that apply to every sample.
ALL_SAMPLES = "*"

_ID_RE = re.compile(r"^[A-Za-z0-9_.\-]+$")


def _as_readonly_f64(values: Sequence[float] | np.ndarray, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


def _check_gid(gid: int) -> int:
    gid = int(gid)
    if gid < 0:
        raise NegativeGid(f"group id must be >= 0, got {gid}")
    return gid


@dataclass(frozen=True, eq=False)
class GazeSample:
    """One recording: a strictly time-ordered gaze point stream.

    Points are held as three parallel float64 arrays rather than a list of
    point objects; the kernels consume the arrays directly.  Monotonicity is
    enforced at ingestion and re-checked by :func:`dataset_validate`, not by
    this constructor, so that validation can *report* rather than throw.
    """

    id: str
    label: str
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    group_id: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "t", _as_readonly_f64(self.t, "t"))
        object.__setattr__(self, "x", _as_readonly_f64(self.x, "x"))
        object.__setattr__(self, "y", _as_readonly_f64(self.y, "y"))
        if not (len(self.t) == len(self.x) == len(self.y)):
            raise ValueError("t, x, y must have equal length")
        _check_gid(self.group_id)

    @property
    def n_points(self) -> int:
        return len(self.t)

    @property
    def t_min(self) -> float:
        return float(self.t[0]) if self.n_points else math.nan

    @property
    def t_max(self) -> float:
        return float(self.t[-1]) if self.n_points else math.nan

    def points(self) -> Iterator[tuple[float, float, float]]:
        """Yield (t, x, y) triples, mostly for serialization and tests."""
        for i in range(self.n_points):
            yield float(self.t[i]), float(self.x[i]), float(self.y[i])


@dataclass(frozen=True)
class Fixation:
    """A dispersion-bounded gaze cluster.

    ``point_span`` is the half-open [start, stop) index range of the raw
    points that formed the cluster.  ``duration`` is t_end - t_start.
    """

    index: int
    cx: float
    cy: float
    t_start: float
    t_end: float
    duration: float
    point_span: tuple[int, int]


@dataclass(frozen=True)
class Saccade:
    """The directed movement between two consecutive fixations."""

    from_fixation: int
    to_fixation: int
    length: float
    duration: float
    angle: float  # radians in (-pi, pi], measured from the +x axis

    @staticmethod
    def between(a: Fixation, b: Fixation) -> "Saccade":
        dx = b.cx - a.cx
        dy = b.cy - a.cy
        return Saccade(
            from_fixation=a.index,
            to_fixation=b.index,
            length=math.hypot(dx, dy),
            duration=b.t_start - a.t_end,
            angle=math.atan2(dy, dx),
        )


@dataclass(frozen=True)
class Rect:
    x: float
    y: float
    w: float
    h: float

    def __post_init__(self) -> None:
        # Coerce up front so serialization is type-stable (400 vs 400.0).
        for name in ("x", "y", "w", "h"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (self.w > 0 and self.h > 0):
            raise DegenerateShape(f"degenerate rect: w={self.w} h={self.h}")

    def contains(self, px: float, py: float) -> bool:
        # Inclusive on all edges: a centroid on the boundary hits the AOI.
        return self.x <= px <= self.x + self.w and self.y <= py <= self.y + self.h

    def bounds(self) -> tuple[float, float, float, float]:
        return self.x, self.y, self.x + self.w, self.y + self.h


@dataclass(frozen=True)
class Polygon:
    vertices: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        verts = tuple((float(a), float(b)) for a, b in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 3:
            raise DegenerateShape(f"degenerate polygon: needs >= 3 vertices, got {len(verts)}")
        xs = {v[0] for v in verts}
        ys = {v[1] for v in verts}
        if len(xs) == 1 or len(ys) == 1:
            raise DegenerateShape("degenerate polygon: zero area")

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        vx = np.array([v[0] for v in self.vertices], dtype=np.float64)
        vy = np.array([v[1] for v in self.vertices], dtype=np.float64)
        return vx, vy

    def contains(self, px: float, py: float) -> bool:
        from .kernels import points_in_polygon

        vx, vy = self.arrays()
        hit = points_in_polygon(
            np.array([px], dtype=np.float64), np.array([py], dtype=np.float64), vx, vy
        )
        return bool(hit[0])

    def bounds(self) -> tuple[float, float, float, float]:
        vx, vy = self.arrays()
        return float(vx.min()), float(vy.min()), float(vx.max()), float(vy.max())


@dataclass(frozen=True)
class Aoi:
    """An area of interest over the stimulus.

    Lower ``precedence`` rank wins when shapes overlap; ties break toward the
    lexicographically smaller id so hit-testing stays deterministic.
    """

    id: str
    name: str
    shape: Rect | Polygon
    precedence: int = 0
    group_id: int = 0

    def __post_init__(self) -> None:
        _check_gid(self.group_id)

    def contains(self, px: float, py: float) -> bool:
        return self.shape.contains(px, py)


@dataclass(frozen=True)
class Twi:
    """A time window of interest, either per-sample or dataset-wide."""

    id: str
    name: str
    sample_id: str  # a sample id, or ALL_SAMPLES
    t_start: float
    t_end: float
    group_id: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "t_start", float(self.t_start))
        object.__setattr__(self, "t_end", float(self.t_end))
        if not self.t_start < self.t_end:
            raise InvertedWindow(f"twi {self.id!r}: [{self.t_start}, {self.t_end}] is not a forward window")
        _check_gid(self.group_id)

    @property
    def length(self) -> float:
        return self.t_end - self.t_start

    def applies_to(self, sample_id: str) -> bool:
        return self.sample_id == ALL_SAMPLES or self.sample_id == sample_id


class Dim(str, Enum):
    """Entity dimensions a matrix axis or a group assignment can range over."""

    SAMPLE = "sample"
    SAMPLE_GROUP = "sample_group"
    AOI = "aoi"
    AOI_GROUP = "aoi_group"
    TWI = "twi"
    TWI_GROUP = "twi_group"

    @property
    def base(self) -> "Dim":
        return {
            Dim.SAMPLE_GROUP: Dim.SAMPLE,
            Dim.AOI_GROUP: Dim.AOI,
            Dim.TWI_GROUP: Dim.TWI,
        }.get(self, self)

    @property
    def is_group(self) -> bool:
        return self is not self.base

    @staticmethod
    def parse(text: str) -> "Dim":
        try:
            return Dim(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown dimension {text!r}") from None


@dataclass(frozen=True)
class Selector:
    """One axis of a scope: everything, one logical group, or one entity."""

    kind: str  # "all" | "group" | "one"
    key: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("all", "group", "one"):
            raise ValueError(f"bad selector kind {self.kind!r}")
        if self.kind == "all" and self.key is not None:
            raise ValueError("selector 'all' takes no key")
        if self.kind != "all" and self.key is None:
            raise ValueError(f"selector {self.kind!r} needs a key")
        if self.kind == "group":
            _check_gid(int(self.key))  # type: ignore[arg-type]

    @staticmethod
    def all() -> "Selector":
        return Selector("all")

    @staticmethod
    def group(gid: int) -> "Selector":
        return Selector("group", str(int(gid)))

    @staticmethod
    def one(entity_id: str) -> "Selector":
        return Selector("one", entity_id)

    @property
    def gid(self) -> int:
        if self.kind != "group":
            raise ValueError("not a group selector")
        return int(self.key)  # type: ignore[arg-type]

    def __str__(self) -> str:
        return self.kind if self.kind == "all" else f"{self.kind}:{self.key}"

    @staticmethod
    def parse(text: str) -> "Selector":
        text = text.strip()
        if text == "all":
            return Selector.all()
        kind, sep, key = text.partition(":")
        if not sep:
            raise ValueError(f"bad selector {text!r}; want all | group:<gid> | one:<id>")
        if kind == "group":
            if not key.lstrip("-").isdigit():
                raise ValueError(f"bad group id {key!r}")
            return Selector.group(int(key))
        if kind == "one":
            if not key:
                raise ValueError("one: needs an entity id")
            return Selector.one(key)
        raise ValueError(f"bad selector kind {kind!r}")


@dataclass(frozen=True)
class Scope:
    """What slice of the dataset analysis currently looks at.

    Two independent axes: which samples, and which time windows.  The 3x3 of
    (All | Group | One) x (All | Group | One) gives the levels of detail the
    interactive views toggle through.
    """

    samples: Selector = field(default_factory=Selector.all)
    twis: Selector = field(default_factory=Selector.all)

    def __str__(self) -> str:
        return f"{self.samples}/{self.twis}"

    @staticmethod
    def parse(text: str) -> "Scope":
        parts = text.strip().split("/")
        if len(parts) != 2:
            raise ValueError(f"bad scope {text!r}; want <samples>/<twis>")
        return Scope(Selector.parse(parts[0]), Selector.parse(parts[1]))


@dataclass(frozen=True)
class GroupTable:
    """gid assignments per dimension.  gid 0 means "ungrouped".

    Entities absent from a mapping implicitly carry gid 0.  Group-level
    aggregation skips gid 0; scoping to group 0 *selects* the ungrouped
    entities, so every entity stays reachable through some group scope.
    """

    samples: Mapping[str, int] = field(default_factory=dict)
    aois: Mapping[str, int] = field(default_factory=dict)
    twis: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for dim_map in (self.samples, self.aois, self.twis):
            for gid in dim_map.values():
                _check_gid(gid)
        object.__setattr__(self, "samples", dict(self.samples))
        object.__setattr__(self, "aois", dict(self.aois))
        object.__setattr__(self, "twis", dict(self.twis))

    def _table(self, dim: Dim) -> dict[str, int]:
        base = dim.base
        if base is Dim.SAMPLE:
            return self.samples  # type: ignore[return-value]
        if base is Dim.AOI:
            return self.aois  # type: ignore[return-value]
        return self.twis  # type: ignore[return-value]

    def gid_of(self, dim: Dim, entity_id: str) -> int:
        return self._table(dim).get(entity_id, 0)

    def gids(self, dim: Dim, entity_ids: Iterable[str]) -> list[int]:
        table = self._table(dim)
        return [table.get(e, 0) for e in entity_ids]

    def with_assignments(self, dim: Dim, assignments: Mapping[str, int]) -> "GroupTable":
        merged = dict(self._table(dim))
        for k, v in assignments.items():
            merged[k] = _check_gid(v)
        base = dim.base
        if base is Dim.SAMPLE:
            return replace(self, samples=merged)
        if base is Dim.AOI:
            return replace(self, aois=merged)
        return replace(self, twis=merged)


@dataclass(frozen=True)
class MetricValue:
    """One scalar metric with enough context to be aggregated correctly.

    ``kind`` tells :func:`gazekit.metrics.aggregate_group` how to pool values
    across group members; medians additionally carry their underlying events
    because a median of medians is not the pooled median.
    """

    metric_id: str
    value: float
    unit: str  # "ms" | "count" | "fraction" | "stimulus-units"
    support: int
    kind: str = "mean"  # "sum" | "mean" | "median" | "fraction"
    events: tuple[float, ...] | None = None


@dataclass(frozen=True, eq=False)
class MetricMatrix:
    """A dense metric over row x col entities.

    ``row_ids``/``col_ids``/``values`` stay in canonical entity order; display
    orderings are carried as permutations (``row_order``/``col_order``) so
    reordering never rewrites the data and every coordinated view can consume
    the same permutation.
    """

    row_dim: Dim
    col_dim: Dim
    metric_id: str
    row_ids: tuple[str, ...]
    col_ids: tuple[str, ...]
    values: np.ndarray
    symmetric: bool = False
    row_order: tuple[int, ...] | None = None
    col_order: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.shape != (len(self.row_ids), len(self.col_ids)):
            raise ValueError(f"matrix shape {arr.shape} != ({len(self.row_ids)}, {len(self.col_ids)})")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)
        if self.symmetric:
            if self.row_ids != self.col_ids:
                raise ValueError("symmetric matrix must have row_ids == col_ids")
            if not np.array_equal(arr, arr.T):
                raise ValueError("matrix flagged symmetric but values are not")
        for order, n in ((self.row_order, len(self.row_ids)), (self.col_order, len(self.col_ids))):
            if order is not None and sorted(order) != list(range(n)):
                raise ValueError(f"order {order} is not a permutation of 0..{n - 1}")

    def with_orders(self, row_order: Sequence[int] | None, col_order: Sequence[int] | None) -> "MetricMatrix":
        return replace(
            self,
            values=self.values,
            row_order=tuple(row_order) if row_order is not None else None,
            col_order=tuple(col_order) if col_order is not None else None,
        )

    def display(self) -> tuple[tuple[str, ...], tuple[str, ...], np.ndarray]:
        """ids and values with the stored display permutations applied."""
        rp = list(self.row_order) if self.row_order is not None else list(range(len(self.row_ids)))
        cp = list(self.col_order) if self.col_order is not None else list(range(len(self.col_ids)))
        rows = tuple(self.row_ids[i] for i in rp)
        cols = tuple(self.col_ids[j] for j in cp)
        return rows, cols, self.values[np.ix_(rp, cp)]

    def value_at(self, row_id: str, col_id: str) -> float:
        try:
            i = self.row_ids.index(row_id)
            j = self.col_ids.index(col_id)
        except ValueError as exc:
            raise UnknownId(str(exc)) from exc
        return float(self.values[i, j])


@dataclass(frozen=True, eq=False)
class DensityGrid:
    """A regular grid of attention mass over the stimulus plane.

    ``mass[iy, ix]`` covers the square cell whose lower corner sits at
    ``(origin[0] + ix*cell_size, origin[1] + iy*cell_size)``.  Cells are
    non-negative and sum to ``total_mass`` (1.0 after normalization).
    """

    origin: tuple[float, float]
    cell_size: float
    width: int
    height: int
    mass: np.ndarray
    total_mass: float

    def __post_init__(self) -> None:
        arr = np.asarray(self.mass, dtype=np.float64)
        if arr.shape != (self.height, self.width):
            raise ValueError(f"mass shape {arr.shape} != ({self.height}, {self.width})")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "mass", arr)

    def cell_center(self, ix: int, iy: int) -> tuple[float, float]:
        return (
            self.origin[0] + (ix + 0.5) * self.cell_size,
            self.origin[1] + (iy + 0.5) * self.cell_size,
        )

    def same_geometry(self, other: "DensityGrid") -> bool:
        return (
            self.origin == other.origin
            and self.cell_size == other.cell_size
            and self.width == other.width
            and self.height == other.height
        )


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.issues


def fmt_num(value: float) -> str:
    """Shortest decimal that round-trips the float64 exactly.

    Integral values serialize bare ("100", not "100.0"); -0.0 keeps its sign
    so byte-identical re-export holds bit-for-bit.
    """

    v = float(value)
    if v == 0.0:
        return "-0" if math.copysign(1.0, v) < 0 else "0"
    if math.isfinite(v) and v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def _check_ids_unique(kind: str, ids: Sequence[str], issues: list[str]) -> None:
    seen: set[str] = set()
    for eid in ids:
        if eid in seen:
            issues.append(f"duplicate {kind} id {eid!r}")
        seen.add(eid)
        if not _ID_RE.match(eid):
            issues.append(f"{kind} id {eid!r} contains unsafe characters")


def dataset_validate(
    samples: Sequence[GazeSample],
    aois: Sequence[Aoi] = (),
    twis: Sequence[Twi] = (),
    groups: GroupTable | None = None,
) -> ValidationReport:
    """Cross-check a dataset and report every problem found.

    Returns a report rather than raising so callers can surface all issues at
    once; a dataset is accepted iff the issue list is empty.
    """

    issues: list[str] = []
    _check_ids_unique("sample", [s.id for s in samples], issues)
    _check_ids_unique("aoi", [a.id for a in aois], issues)
    _check_ids_unique("twi", [w.id for w in twis], issues)

    sample_ids = {s.id for s in samples}
    for s in samples:
        if s.n_points == 0:
            issues.append(f"sample {s.id!r} has no points")
            continue
        bad = np.nonzero(~np.isfinite(s.t) | ~np.isfinite(s.x) | ~np.isfinite(s.y))[0]
        if bad.size:
            issues.append(f"sample {s.id!r}: non-finite value at index {int(bad[0])}")
        nonmono = np.nonzero(np.diff(s.t) <= 0)[0]
        if nonmono.size:
            issues.append(f"sample {s.id!r}: non-increasing timestamp at index {int(nonmono[0]) + 1}")

    for w in twis:
        if w.sample_id != ALL_SAMPLES and w.sample_id not in sample_ids:
            issues.append(f"twi {w.id!r} references unknown sample {w.sample_id!r}")

    if groups is not None:
        known = {
            Dim.SAMPLE: sample_ids,
            Dim.AOI: {a.id for a in aois},
            Dim.TWI: {w.id for w in twis},
        }
        for dim, table in (
            (Dim.SAMPLE, groups.samples),
            (Dim.AOI, groups.aois),
            (Dim.TWI, groups.twis),
        ):
            for eid in table:
                if eid not in known[dim]:
                    issues.append(f"group assignment for unknown {dim.value} {eid!r}")

    return ValidationReport(tuple(issues))
