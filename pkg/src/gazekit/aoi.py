"""AOI hit-testing, fixation labeling, visits, sequences, and transitions.

A fixation is labeled by the AOI containing its centroid; overlaps resolve
by precedence rank (lower wins, ties by id).  A visit is a maximal run of
consecutive fixations sharing one AOI label.  Transition counting operates
on the visit-collapsed label sequence with NONE markers retained: NONE
breaks adjacency for Direct/Glance/Through and mediates Indirect.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Literal, Mapping, Sequence

import numpy as np

from . import kernels
from .errors import EmptyInput, UnknownFocusAoi
from .model import Aoi, Dim, Fixation, GroupTable, Polygon, Rect

__all__ = [
    "FocusClass",
    "LabeledFixation",
    "TransitionCounts",
    "TransitionKind",
    "Visit",
    "aoi_sequence",
    "focus_context",
    "haar",
    "hit_test",
    "label_fixations",
    "timeline_segments",
    "transition_counts",
    "transition_events",
    "visits",
]


@dataclass(frozen=True)
class LabeledFixation:
    fixation: Fixation
    aoi_id: str | None  # None = outside every AOI


@dataclass(frozen=True)
class Visit:
    """Maximal run of consecutive fixations in one AOI.

    first_fixation/last_fixation are inclusive ordinals into the label list
    the visit was derived from; duration sums member fixation durations.
    """

    aoi_id: str
    first_fixation: int
    last_fixation: int
    duration: float

    @property
    def length(self) -> int:
        return self.last_fixation - self.first_fixation + 1


class TransitionKind(str, Enum):
    DIRECT = "direct"
    INDIRECT = "indirect"
    THROUGH = "through"
    GLANCE = "glance"


class FocusClass(str, Enum):
    ENTERING = "entering"
    LEAVING = "leaving"
    GLANCING_OUT = "glancing_out"
    INSIDE = "inside"
    UNRELATED = "unrelated"


@dataclass(frozen=True, eq=False)
class TransitionCounts:
    kind: TransitionKind
    alphabet: tuple[str, ...]
    counts: np.ndarray  # (K, K) int64, row = from, col = to
    focus: str | None = None  # set iff kind is THROUGH

    def __post_init__(self) -> None:
        arr = np.asarray(self.counts, dtype=np.int64)
        k = len(self.alphabet)
        if arr.shape != (k, k):
            raise ValueError(f"counts shape {arr.shape} != ({k}, {k})")
        if (arr < 0).any():
            raise ValueError("negative transition count")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "counts", arr)

    def flat_offdiag(self) -> np.ndarray:
        k = len(self.alphabet)
        mask = ~np.eye(k, dtype=bool)
        return self.counts[mask].astype(np.float64)

    def same_alphabet(self, other: "TransitionCounts") -> bool:
        return self.alphabet == other.alphabet and self.kind == other.kind


def _rank_key(aoi: Aoi) -> tuple[int, str]:
    return (aoi.precedence, aoi.id)


def hit_test(x: float, y: float, aois: Sequence[Aoi]) -> str | None:
    """Best-precedence AOI containing (x, y), or None."""
    best: Aoi | None = None
    for aoi in aois:
        if aoi.contains(x, y) and (best is None or _rank_key(aoi) < _rank_key(best)):
            best = aoi
    return best.id if best is not None else None


def label_fixations(fixations: Sequence[Fixation], aois: Sequence[Aoi]) -> list[LabeledFixation]:
    """Label every fixation centroid; vectorized per AOI shape."""
    n = len(fixations)
    if n == 0:
        return []
    if not aois:
        return [LabeledFixation(f, None) for f in fixations]
    cx = np.array([f.cx for f in fixations], dtype=np.float64)
    cy = np.array([f.cy for f in fixations], dtype=np.float64)
    ranked = sorted(aois, key=_rank_key)
    labels: list[str | None] = [None] * n
    unresolved = np.ones(n, dtype=bool)
    for aoi in ranked:
        if not unresolved.any():
            break
        if isinstance(aoi.shape, Rect):
            r = aoi.shape
            inside = (cx >= r.x) & (cx <= r.x + r.w) & (cy >= r.y) & (cy <= r.y + r.h)
        else:
            vx, vy = aoi.shape.arrays()
            inside = kernels.points_in_polygon(cx, cy, vx, vy)
        hit = unresolved & np.asarray(inside, dtype=bool)
        for i in np.nonzero(hit)[0]:
            labels[int(i)] = aoi.id
        unresolved &= ~hit
    return [LabeledFixation(f, labels[i]) for i, f in enumerate(fixations)]


def haar(labels: Sequence[LabeledFixation]) -> float:
    """Hit-any-AOI rate: fraction of fixations inside at least one AOI."""
    if not labels:
        raise EmptyInput("haar needs at least one fixation")
    hit = sum(1 for lf in labels if lf.aoi_id is not None)
    return hit / len(labels)


def visits(labels: Sequence[LabeledFixation]) -> list[Visit]:
    out: list[Visit] = []
    run_start = 0
    for k in range(1, len(labels) + 1):
        if k < len(labels) and labels[k].aoi_id == labels[run_start].aoi_id:
            continue
        aoi_id = labels[run_start].aoi_id
        if aoi_id is not None:
            out.append(
                Visit(
                    aoi_id=aoi_id,
                    first_fixation=run_start,
                    last_fixation=k - 1,
                    duration=sum(lf.fixation.duration for lf in labels[run_start:k]),
                )
            )
        run_start = k
    return out


def _gid_mapper(aois: Sequence[Aoi], groups: GroupTable | None) -> Mapping[str, int]:
    if groups is None:
        return {a.id: a.group_id for a in aois}
    return {a.id: groups.gid_of(Dim.AOI, a.id) for a in aois}


def _mapped_labels(
    labels: Sequence[LabeledFixation],
    alphabet: Literal["aoi", "aoi_group"],
    aois: Sequence[Aoi] | None,
    groups: GroupTable | None,
) -> list[str | None]:
    if alphabet == "aoi":
        return [lf.aoi_id for lf in labels]
    if aois is None:
        raise ValueError("aoi_group alphabet needs the AOI list")
    gid_of = _gid_mapper(aois, groups)
    mapped: list[str | None] = []
    for lf in labels:
        gid = gid_of.get(lf.aoi_id, 0) if lf.aoi_id is not None else 0
        # gid 0 is "ungrouped": such fixations read as outside-any-group.
        mapped.append(str(gid) if gid != 0 else None)
    return mapped


def _collapse(symbols: Sequence[str | None]) -> list[str | None]:
    """Merge adjacent equal symbols; NONE runs shrink to a single marker."""
    out: list[str | None] = []
    for s in symbols:
        if not out or out[-1] != s:
            out.append(s)
    return out


def aoi_sequence(
    labels: Sequence[LabeledFixation],
    alphabet: Literal["aoi", "aoi_group"] = "aoi",
    collapse: Literal["per_fixation", "per_visit"] = "per_visit",
    aois: Sequence[Aoi] | None = None,
    groups: GroupTable | None = None,
) -> list[str]:
    """The sample's AOI (or AOI-group) visiting sequence.

    per_fixation keeps one symbol per labeled fixation; per_visit collapses
    consecutive repeats.  Unlabeled fixations never emit a symbol.
    """
    mapped = _mapped_labels(labels, alphabet, aois, groups)
    if collapse == "per_fixation":
        return [s for s in mapped if s is not None]
    return [s for s in _collapse(mapped) if s is not None]


def _transition_universe(
    alphabet: Literal["aoi", "aoi_group"],
    aois: Sequence[Aoi],
    groups: GroupTable | None,
) -> tuple[str, ...]:
    if alphabet == "aoi":
        return tuple(sorted(a.id for a in aois))
    gid_of = _gid_mapper(aois, groups)
    return tuple(str(g) for g in sorted({gid for gid in gid_of.values() if gid != 0}))


def _scan_transitions(
    collapsed: Sequence[str | None], kind: TransitionKind, focus: str | None
) -> Iterable[tuple[str, str, int]]:
    """Yield (from, to, position) evidence; position indexes ``collapsed``."""
    n = len(collapsed)
    if kind is TransitionKind.DIRECT:
        for k in range(n - 1):
            u, v = collapsed[k], collapsed[k + 1]
            if u is not None and v is not None:
                yield u, v, k
    elif kind is TransitionKind.INDIRECT:
        for k in range(n - 2):
            u, mid, v = collapsed[k], collapsed[k + 1], collapsed[k + 2]
            if u is not None and mid is None and v is not None and u != v:
                yield u, v, k
    elif kind is TransitionKind.THROUGH:
        for k in range(n - 2):
            u, mid, v = collapsed[k], collapsed[k + 1], collapsed[k + 2]
            if u is not None and v is not None and mid == focus and u != focus and v != focus:
                yield u, v, k
    else:  # GLANCE
        for k in range(n - 2):
            u, mid, v = collapsed[k], collapsed[k + 1], collapsed[k + 2]
            if u is not None and mid is not None and v == u and mid != u:
                yield u, mid, k


def transition_counts(
    labels: Sequence[LabeledFixation],
    kind: TransitionKind,
    aois: Sequence[Aoi],
    alphabet: Literal["aoi", "aoi_group"] = "aoi",
    groups: GroupTable | None = None,
    focus: str | None = None,
) -> TransitionCounts:
    """Count Direct/Indirect/Through/Glance transitions over the visit sequence.

    Through needs a focus symbol (an AOI id, or a gid string under the
    aoi_group alphabet) and counts (i, focus, j) triples, i and j both
    different from the focus; i == j is allowed there and in Indirect is not.
    """
    universe = _transition_universe(alphabet, aois, groups)
    if kind is TransitionKind.THROUGH:
        if focus is None or focus not in universe:
            raise UnknownFocusAoi(f"focus {focus!r} is not in the {alphabet} alphabet")
    index = {s: i for i, s in enumerate(universe)}
    counts = np.zeros((len(universe), len(universe)), dtype=np.int64)
    collapsed = _collapse(_mapped_labels(labels, alphabet, aois, groups))
    for u, v, _pos in _scan_transitions(collapsed, kind, focus):
        counts[index[u], index[v]] += 1
    return TransitionCounts(kind=kind, alphabet=universe, counts=counts, focus=focus)


def transition_events(
    labels: Sequence[LabeledFixation],
    kind: TransitionKind,
    aois: Sequence[Aoi],
    alphabet: Literal["aoi", "aoi_group"] = "aoi",
    groups: GroupTable | None = None,
    focus: str | None = None,
) -> dict[tuple[str, str], list[tuple[int, int]]]:
    """Provenance for brushing: per (from, to) cell, the fixation-ordinal
    ranges [first, last] of the visits that realize each counted transition."""
    universe = _transition_universe(alphabet, aois, groups)
    if kind is TransitionKind.THROUGH and (focus is None or focus not in universe):
        raise UnknownFocusAoi(f"focus {focus!r} is not in the {alphabet} alphabet")
    mapped = _mapped_labels(labels, alphabet, aois, groups)
    collapsed: list[str | None] = []
    spans: list[tuple[int, int]] = []  # fixation-ordinal span per collapsed entry
    for i, s in enumerate(mapped):
        if not collapsed or collapsed[-1] != s:
            collapsed.append(s)
            spans.append((i, i))
        else:
            spans[-1] = (spans[-1][0], i)
    width = {TransitionKind.DIRECT: 2}.get(kind, 3)
    out: dict[tuple[str, str], list[tuple[int, int]]] = {}
    for u, v, pos in _scan_transitions(collapsed, kind, focus):
        lo = spans[pos][0]
        hi = spans[pos + width - 1][1]
        out.setdefault((u, v), []).append((lo, hi))
    return out


def focus_context(
    labels: Sequence[LabeledFixation],
    focus_aoi: str,
    aoi_ids: Iterable[str] | None = None,
) -> list[FocusClass]:
    """Classify each fixation relative to one AOI.

    Entering marks the first fixation of a focus visit that has an outside
    predecessor; Leaving marks the first outside fixation after a focus
    visit; a Leaving fixation whose run leads straight back into the focus
    is GlancingOut instead.  Sequence-initial focus visits produce no
    Entering mark.
    """
    if aoi_ids is not None and focus_aoi not in set(aoi_ids):
        raise UnknownFocusAoi(f"unknown focus AOI {focus_aoi!r}")
    n = len(labels)
    seq = [lf.aoi_id for lf in labels]
    out = [FocusClass.UNRELATED] * n

    # Runs of equal labels: (label, start, stop_exclusive).
    runs: list[tuple[str | None, int, int]] = []
    start = 0
    for k in range(1, n + 1):
        if k < n and seq[k] == seq[start]:
            continue
        runs.append((seq[start], start, k))
        start = k

    for r, (label, lo, hi) in enumerate(runs):
        if label == focus_aoi:
            for i in range(lo, hi):
                out[i] = FocusClass.INSIDE
            if lo > 0:
                out[lo] = FocusClass.ENTERING
        elif r > 0 and runs[r - 1][0] == focus_aoi:
            next_is_focus = r + 1 < len(runs) and runs[r + 1][0] == focus_aoi
            out[lo] = FocusClass.GLANCING_OUT if next_is_focus else FocusClass.LEAVING
    return out


def timeline_segments(
    labels: Sequence[LabeledFixation],
) -> list[tuple[float, float, str | None]]:
    """Scarf-plot segments: one (t_start, t_end, aoi_id) per label run,
    NONE runs included so the timeline shows uncovered spans."""
    segments: list[tuple[float, float, str | None]] = []
    start = 0
    n = len(labels)
    for k in range(1, n + 1):
        if k < n and labels[k].aoi_id == labels[start].aoi_id:
            continue
        segments.append(
            (labels[start].fixation.t_start, labels[k - 1].fixation.t_end, labels[start].aoi_id)
        )
        start = k
    return segments
