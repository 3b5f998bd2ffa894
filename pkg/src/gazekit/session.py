"""Versioned analysis sessions: state, scope resolution, edits.

A session is an immutable snapshot; every edit returns a new snapshot with
a bumped ``dataset_version``, so readers can cache derived artifacts by
(version, parameters) and queries at a fixed version are referentially
transparent.  Fixation detection always runs over each full sample once;
scoping then filters the detected events, never re-runs detection.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Mapping, Sequence

from .aoi import LabeledFixation, label_fixations
from .bundling import BundleParams
from .density import KdeParams
from .errors import EmptySelection, UnknownId, UnknownScopeTarget
from .fixations import DetectionParams, derive_saccades, detect_fixations
from .model import (
    Aoi,
    Dim,
    Fixation,
    GazeSample,
    GroupTable,
    Polygon,
    Rect,
    Saccade,
    Scope,
    Selector,
    Twi,
)
from .similarity import NwScoring

__all__ = [
    "MatrixSpec",
    "ScopedSample",
    "ScopedView",
    "Session",
    "dataset_bounds",
    "fixations_for",
    "labels_for",
    "resolve_scope",
    "saccades_for",
    "time_fraction_filter",
]


@dataclass(frozen=True)
class MatrixSpec:
    """A registered matrix: what to compute and how to order it."""

    id: str
    rows: Dim
    cols: Dim
    metric: str
    reorder: str = "none"  # "none" | "global"

    def __post_init__(self) -> None:
        if self.reorder not in ("none", "global"):
            raise ValueError(f"reorder must be none|global, got {self.reorder!r}")


@dataclass(frozen=True, eq=False)
class Session:
    dataset_version: int = 1
    samples: tuple[GazeSample, ...] = ()
    aois: tuple[Aoi, ...] = ()
    twis: tuple[Twi, ...] = ()
    groups: GroupTable = field(default_factory=GroupTable)
    detection_params: DetectionParams = field(default_factory=DetectionParams)
    kde_params: KdeParams = field(default_factory=KdeParams)
    bundle_params: BundleParams = field(default_factory=BundleParams)
    nw_scoring: NwScoring = field(default_factory=NwScoring)
    scope: Scope = field(default_factory=Scope)
    time_fraction: float = 1.0
    matrix_specs: tuple[MatrixSpec, ...] = ()

    def __post_init__(self) -> None:
        # Canonical entity order everywhere: ascending id.
        object.__setattr__(self, "samples", tuple(sorted(self.samples, key=lambda s: s.id)))
        object.__setattr__(self, "aois", tuple(sorted(self.aois, key=lambda a: a.id)))
        object.__setattr__(self, "twis", tuple(sorted(self.twis, key=lambda w: w.id)))
        if not 0.0 <= self.time_fraction <= 1.0:
            raise ValueError(f"time_fraction must be in [0, 1], got {self.time_fraction}")
        # The group table is the single authority; nonzero gids carried on
        # entity records only fill entities the table does not mention, so
        # explicit assignments (including an exclusion to gid 0) stay put.
        merged = self.groups
        for dim, entities in (
            (Dim.SAMPLE, self.samples),
            (Dim.AOI, self.aois),
            (Dim.TWI, self.twis),
        ):
            table = merged._table(dim)
            gaps = {e.id: e.group_id for e in entities if e.group_id != 0 and e.id not in table}
            if gaps:
                merged = merged.with_assignments(dim, gaps)
        object.__setattr__(self, "groups", merged)

    # -- lookups ---------------------------------------------------------

    @property
    def sample_map(self) -> Mapping[str, GazeSample]:
        return {s.id: s for s in self.samples}

    @property
    def aoi_map(self) -> Mapping[str, Aoi]:
        return {a.id: a for a in self.aois}

    @property
    def twi_map(self) -> Mapping[str, Twi]:
        return {w.id: w for w in self.twis}

    # -- edits (each returns a bumped snapshot) --------------------------

    def _bump(self, **changes) -> "Session":
        return replace(self, dataset_version=self.dataset_version + 1, **changes)

    def _carry_gids(self, dim: Dim, carried: Mapping[str, int]) -> GroupTable:
        # Entity records arriving from files carry a gid; fold the nonzero
        # ones into the table (0 means "nothing carried", never an unassign).
        nonzero = {k: v for k, v in carried.items() if v != 0}
        return self.groups.with_assignments(dim, nonzero) if nonzero else self.groups

    def with_samples(self, new_samples: Sequence[GazeSample], extra_twis: Sequence[Twi] = ()) -> "Session":
        """Add or replace samples by id; optional derived windows ride along."""
        merged = {s.id: s for s in self.samples}
        for s in new_samples:
            merged[s.id] = s
        twis = {w.id: w for w in self.twis}
        for w in extra_twis:
            twis[w.id] = w
        groups = self._carry_gids(Dim.TWI, {w.id: w.group_id for w in extra_twis})
        return self._bump(samples=tuple(merged.values()), twis=tuple(twis.values()), groups=groups)

    def with_aois(self, aois: Sequence[Aoi]) -> "Session":
        groups = self._carry_gids(Dim.AOI, {a.id: a.group_id for a in aois})
        return self._bump(aois=tuple(aois), groups=groups)

    def with_twis(self, twis: Sequence[Twi]) -> "Session":
        groups = self._carry_gids(Dim.TWI, {w.id: w.group_id for w in twis})
        return self._bump(twis=tuple(twis), groups=groups)

    def with_groups(self, groups: GroupTable) -> "Session":
        return self._bump(groups=groups)

    def edit_groups(self, dim: Dim, assignments: Mapping[str, int]) -> "Session":
        known = {
            Dim.SAMPLE: {s.id for s in self.samples},
            Dim.AOI: {a.id for a in self.aois},
            Dim.TWI: {w.id for w in self.twis},
        }[dim.base]
        for eid in assignments:
            if eid not in known:
                raise UnknownId(f"unknown {dim.base.value} {eid!r}")
        return self._bump(groups=self.groups.with_assignments(dim, assignments))

    def edit_aoi_geometry(self, aoi_id: str, new_shape: Rect | Polygon) -> "Session":
        by_id = self.aoi_map
        if aoi_id not in by_id:
            raise UnknownId(f"unknown aoi {aoi_id!r}")
        updated = tuple(
            replace(a, shape=new_shape) if a.id == aoi_id else a for a in self.aois
        )
        return self._bump(aois=updated)

    def with_detection_params(self, params: DetectionParams) -> "Session":
        return self._bump(detection_params=params)

    def with_kde_params(self, params: KdeParams) -> "Session":
        return self._bump(kde_params=params)

    def with_bundle_params(self, params: BundleParams) -> "Session":
        return self._bump(bundle_params=params)

    def with_nw_scoring(self, scoring: NwScoring) -> "Session":
        return self._bump(nw_scoring=scoring)

    def with_scope(self, scope: Scope) -> "Session":
        out = self._bump(scope=scope)
        resolve_scope(out)  # validates targets; raises UnknownScopeTarget
        return out

    def with_time_fraction(self, f: float) -> "Session":
        return self._bump(time_fraction=float(f))

    def with_matrix_specs(self, specs: Sequence[MatrixSpec]) -> "Session":
        seen: set[str] = set()
        for spec in specs:
            if spec.id in seen:
                raise ValueError(f"duplicate matrix id {spec.id!r}")
            seen.add(spec.id)
        return self._bump(matrix_specs=tuple(specs))


# -- derived values (cached on session identity; sessions are immutable) --


@lru_cache(maxsize=1024)
def fixations_for(session: Session, sample_id: str) -> tuple[Fixation, ...]:
    sample = session.sample_map.get(sample_id)
    if sample is None:
        raise UnknownId(f"unknown sample {sample_id!r}")
    return tuple(detect_fixations(sample, session.detection_params))


@lru_cache(maxsize=1024)
def saccades_for(session: Session, sample_id: str) -> tuple[Saccade, ...]:
    return tuple(derive_saccades(fixations_for(session, sample_id)))


@lru_cache(maxsize=1024)
def labels_for(session: Session, sample_id: str) -> tuple[LabeledFixation, ...]:
    return tuple(label_fixations(fixations_for(session, sample_id), session.aois))


def dataset_bounds(session: Session, pad: float) -> Rect:
    """Bounding box of every gaze point, inflated by ``pad`` per side.

    One shared rect per dataset keeps all density grids comparable.
    """
    xs_min: float | None = None
    xs_max = ys_min = ys_max = None
    for s in session.samples:
        if s.n_points == 0:
            continue
        if xs_min is None:
            xs_min, xs_max = float(s.x.min()), float(s.x.max())
            ys_min, ys_max = float(s.y.min()), float(s.y.max())
        else:
            xs_min = min(xs_min, float(s.x.min()))
            xs_max = max(xs_max, float(s.x.max()))
            ys_min = min(ys_min, float(s.y.min()))
            ys_max = max(ys_max, float(s.y.max()))
    if xs_min is None:
        raise EmptySelection("dataset has no gaze points")
    return Rect(
        x=xs_min - pad, y=ys_min - pad, w=(xs_max - xs_min) + 2 * pad, h=(ys_max - ys_min) + 2 * pad
    )


# -- scope resolution ------------------------------------------------------


@dataclass(frozen=True)
class ScopedSample:
    """One sample's events restricted to the resolved scope."""

    sample_id: str
    fixations: tuple[Fixation, ...]
    labels: tuple[LabeledFixation, ...]  # parallel to fixations
    saccades: tuple[Saccade, ...]  # both endpoint fixations in scope
    windows: tuple[tuple[float, float], ...] | None  # None = full span
    scoped_duration: float
    span: tuple[float, float]


@dataclass(frozen=True)
class ScopedView:
    scope: Scope
    entries: tuple[ScopedSample, ...]

    def entry(self, sample_id: str) -> ScopedSample:
        for e in self.entries:
            if e.sample_id == sample_id:
                return e
        raise UnknownId(f"sample {sample_id!r} not in scope")


def _selected_samples(session: Session, sel: Selector) -> list[GazeSample]:
    if sel.kind == "all":
        return list(session.samples)
    if sel.kind == "group":
        gid = sel.gid
        members = [s for s in session.samples if session.groups.gid_of(Dim.SAMPLE, s.id) == gid]
        if not members and gid != 0:
            raise UnknownScopeTarget(f"no sample carries gid {gid}")
        return members
    sample = session.sample_map.get(sel.key or "")
    if sample is None:
        raise UnknownScopeTarget(f"unknown sample {sel.key!r}")
    return [sample]


def _selected_twis(session: Session, sel: Selector) -> list[Twi] | None:
    if sel.kind == "all":
        return None
    if sel.kind == "group":
        gid = sel.gid
        members = [w for w in session.twis if session.groups.gid_of(Dim.TWI, w.id) == gid]
        if not members and gid != 0:
            raise UnknownScopeTarget(f"no twi carries gid {gid}")
        return members
    twi = session.twi_map.get(sel.key or "")
    if twi is None:
        raise UnknownScopeTarget(f"unknown twi {sel.key!r}")
    return [twi]


def _in_any_window(t: float, windows: Sequence[tuple[float, float]]) -> bool:
    # Half-open membership so adjacent windows never double-count an event.
    return any(lo <= t < hi for lo, hi in windows)


def scoped_sample_view(
    session: Session, sample: GazeSample, twis: Sequence[Twi] | None
) -> ScopedSample:
    fixations = fixations_for(session, sample.id)
    labels = labels_for(session, sample.id)
    saccades = saccades_for(session, sample.id)

    if twis is None:
        windows = None
        keep = set(range(len(fixations)))
        if sample.n_points:
            span = (sample.t_min, sample.t_max)
            duration = sample.t_max - sample.t_min
        else:
            span = (0.0, 0.0)
            duration = 0.0
    else:
        applicable = sorted(
            ((w.t_start, w.t_end) for w in twis if w.applies_to(sample.id)),
            key=lambda p: (p[0], p[1]),
        )
        windows = tuple(applicable)
        keep = {
            i for i, f in enumerate(fixations) if _in_any_window(f.t_start, applicable)
        }
        duration = sum(hi - lo for lo, hi in applicable)
        if applicable:
            span = (min(lo for lo, _ in applicable), max(hi for _, hi in applicable))
        else:
            span = (0.0, 0.0)

    kept_fix = tuple(f for i, f in enumerate(fixations) if i in keep)
    kept_labels = tuple(lf for i, lf in enumerate(labels) if i in keep)
    kept_sacc = tuple(
        s for s in saccades if s.from_fixation in keep and s.to_fixation in keep
    )
    return ScopedSample(
        sample_id=sample.id,
        fixations=kept_fix,
        labels=kept_labels,
        saccades=kept_sacc,
        windows=windows,
        scoped_duration=float(duration),
        span=span,
    )


def resolve_scope(session: Session, scope: Scope | None = None) -> ScopedView:
    """Resolve a scope to per-sample event subsets.

    Sample axis picks the recordings; TWI axis picks time windows.  A
    fixation is in scope iff its t_start falls in a selected window
    (half-open); a saccade needs both endpoints in scope.  The scoped
    duration (metric denominator) is the summed window length, or the full
    recording span when no window filter is active.
    """
    scope = scope if scope is not None else session.scope
    samples = _selected_samples(session, scope.samples)
    twis = _selected_twis(session, scope.twis)
    entries = tuple(scoped_sample_view(session, s, twis) for s in samples)
    return ScopedView(scope=scope, entries=entries)


def time_fraction_filter(view: ScopedView, f: float) -> ScopedView:
    """Chronological reveal: keep each sample's fixations with
    t_start <= span_start + f * span_length.  f = 0 empties the event sets;
    f = 1 is the identity.  Metric denominators are untouched: this filter
    feeds the animated spatial/timeline event sets, not the metrics.
    """
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"fraction must be in [0, 1], got {f}")
    if f == 1.0:
        return view
    entries: list[ScopedSample] = []
    for e in view.entries:
        if f == 0.0:
            kept: set[int] = set()
        else:
            cutoff = e.span[0] + f * (e.span[1] - e.span[0])
            kept = {i for i, fx in enumerate(e.fixations) if fx.t_start <= cutoff}
        kept_orig = {e.fixations[i].index for i in kept}
        entries.append(
            replace(
                e,
                fixations=tuple(fx for i, fx in enumerate(e.fixations) if i in kept),
                labels=tuple(lf for i, lf in enumerate(e.labels) if i in kept),
                saccades=tuple(
                    s
                    for s in e.saccades
                    if s.from_fixation in kept_orig and s.to_fixation in kept_orig
                ),
            )
        )
    return ScopedView(scope=view.scope, entries=tuple(entries))
