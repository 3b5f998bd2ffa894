"""Relationship matrices between entity dimensions, and their reordering.

``relationship_matrix`` fills a grid for any supported (row_dim, col_dim,
metric) combination under a scope; ``reorder_global``/``sort_local`` return
display permutations.  Orderings are carried next to the matrix, never a
rewrite of the values, so every coordinated view can consume the same
permutation.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np
from scipy.cluster.hierarchy import leaves_list, linkage, optimal_leaf_ordering
from scipy.spatial.distance import pdist

from .aoi import (
    LabeledFixation,
    TransitionCounts,
    TransitionKind,
    aoi_sequence,
    haar,
    transition_counts,
)
from .density import density_grid
from .errors import EmptyInput, GazekitError, UnsupportedCombination
from .metrics import aggregate_group, fixation_aoi_stats, saccade_stats
from .model import DensityGrid, Dim, MetricMatrix, MetricValue, Rect, Scope, Twi
from .session import (
    MatrixSpec,
    ScopedSample,
    Session,
    dataset_bounds,
    resolve_scope,
    scoped_sample_view,
)
from .similarity import density_overlap, nw_score, similarity_matrix, transition_cosine

__all__ = [
    "AOI_TRANSITION_METRICS",
    "SAMPLE_AOI_METRICS",
    "SAMPLE_TWI_METRICS",
    "SIMILARITY_METRICS",
    "build_matrix",
    "relationship_matrix",
    "reorder_global",
    "sort_local",
]

SAMPLE_AOI_METRICS = (
    "fixation_count",
    "total_duration",
    "mean_duration",
    "median_duration",
    "pct_time",
    "visit_count",
    "mean_visit_duration",
    "haar",
)
AOI_TRANSITION_METRICS = ("direct", "indirect", "glance")  # plus "through:<focus>"
SIMILARITY_METRICS = ("nw", "nw_raw", "cosine", "density")
SAMPLE_TWI_METRICS = (
    "fixation_count",
    "total_duration",
    "mean_duration",
    "median_duration",
    "pct_time",
    "haar",
    "saccade_count",
    "mean_saccade_length",
)


# -- reordering ------------------------------------------------------------


def _seriate(rows: np.ndarray) -> list[int]:
    n = rows.shape[0]
    if n <= 2:
        return list(range(n))
    # Tiny index bias makes exact-duplicate rows distinct so the leaf order
    # is deterministic instead of depending on scipy tie handling.
    spread = float(np.ptp(rows)) or 1.0
    keyed = np.column_stack([rows, np.arange(n, dtype=np.float64) * spread * 1e-9])
    dists = pdist(keyed, metric="euclidean")
    z = linkage(dists, method="average")
    return [int(i) for i in leaves_list(optimal_leaf_ordering(z, dists))]


def reorder_global(matrix: MetricMatrix) -> tuple[list[int], list[int]]:
    """Seriation permutations (row_perm, col_perm).

    Average-linkage agglomerative clustering with optimal leaf ordering on
    Euclidean row distances; symmetric matrices reuse the row permutation
    for columns so the diagonal stays on the diagonal.
    """
    values = matrix.values
    if values.size == 0:
        raise GazekitError("cannot reorder an empty matrix")
    row_perm = _seriate(values)
    if matrix.symmetric:
        return row_perm, list(row_perm)
    col_perm = _seriate(values.T.copy())
    return row_perm, col_perm


def sort_local(matrix: MetricMatrix, axis: str, key_index: int, direction: str = "asc") -> list[int]:
    """Permutation of the opposite axis, stably sorted by one row/column.

    axis="row" sorts the columns by the values in row ``key_index``;
    axis="col" sorts the rows by column ``key_index``.
    """
    if axis not in ("row", "col"):
        raise ValueError(f"axis must be row|col, got {axis!r}")
    if direction not in ("asc", "desc"):
        raise ValueError(f"direction must be asc|desc, got {direction!r}")
    n_keys = len(matrix.row_ids) if axis == "row" else len(matrix.col_ids)
    if not 0 <= key_index < n_keys:
        raise IndexError(f"key index {key_index} out of range for {n_keys} {axis}s")
    line = matrix.values[key_index, :] if axis == "row" else matrix.values[:, key_index]
    # argsort of the negated line keeps original order within ties, which
    # makes desc the stable mirror of asc rather than a full reversal.
    order = np.argsort(-line if direction == "desc" else line, kind="stable")
    return [int(i) for i in order]


# -- entity enumeration ------------------------------------------------------


def _group_entities(gids: Sequence[int]) -> tuple[str, ...]:
    return tuple(str(g) for g in sorted({g for g in gids if g != 0}))


def _sample_axis(session: Session, dim: Dim, entries: Sequence[ScopedSample]) -> tuple[str, ...]:
    if dim is Dim.SAMPLE:
        return tuple(e.sample_id for e in entries)
    gids = session.groups.gids(Dim.SAMPLE, [e.sample_id for e in entries])
    return _group_entities(gids)


def _aoi_axis(session: Session, dim: Dim) -> tuple[str, ...]:
    if dim is Dim.AOI:
        return tuple(a.id for a in session.aois)
    return _group_entities(session.groups.gids(Dim.AOI, [a.id for a in session.aois]))


def _twi_axis(session: Session, dim: Dim, twis: Sequence[Twi]) -> tuple[str, ...]:
    if dim is Dim.TWI:
        return tuple(w.id for w in twis)
    return _group_entities(session.groups.gids(Dim.TWI, [w.id for w in twis]))


def _scoped_twi_entities(session: Session, scope: Scope) -> list[Twi]:
    sel = scope.twis
    if sel.kind == "all":
        return list(session.twis)
    if sel.kind == "group":
        return [w for w in session.twis if session.groups.gid_of(Dim.TWI, w.id) == sel.gid]
    return [session.twi_map[sel.key]] if sel.key in session.twi_map else []


def _sample_members(session: Session, dim: Dim, entity: str, entries: Sequence[ScopedSample]) -> list[ScopedSample]:
    if dim is Dim.SAMPLE:
        return [e for e in entries if e.sample_id == entity]
    gid = int(entity)
    return [e for e in entries if session.groups.gid_of(Dim.SAMPLE, e.sample_id) == gid]


def _aoi_members(session: Session, dim: Dim, entity: str) -> list[str]:
    if dim is Dim.AOI:
        return [entity]
    gid = int(entity)
    return [a.id for a in session.aois if session.groups.gid_of(Dim.AOI, a.id) == gid]


def _twi_members(session: Session, dim: Dim, entity: str, twis: Sequence[Twi]) -> list[Twi]:
    if dim is Dim.TWI:
        return [w for w in twis if w.id == entity]
    gid = int(entity)
    return [w for w in twis if session.groups.gid_of(Dim.TWI, w.id) == gid]


# -- cell computation --------------------------------------------------------


def _haar_value(labels: Sequence[LabeledFixation]) -> MetricValue:
    try:
        value = haar(labels)
    except EmptyInput:
        value = 0.0
    return MetricValue("haar", value, "fraction", len(labels), "fraction")


def _sample_aoi_cell(
    session: Session,
    members: Sequence[ScopedSample],
    aoi_ids: Sequence[str],
    metric_id: str,
) -> float:
    values: list[MetricValue] = []
    for e in members:
        if metric_id == "haar":
            values.append(_haar_value(e.labels))
        else:
            stats = fixation_aoi_stats(e.labels, aoi_ids, e.scoped_duration)
            values.append(stats[metric_id])
    if not values:
        return 0.0
    return aggregate_group(values).value if len(values) > 1 else values[0].value


def _sample_twi_cell(
    session: Session,
    sample_ids: Sequence[str],
    windows: Sequence[Twi],
    metric_id: str,
) -> float:
    values: list[MetricValue] = []
    for sid in sample_ids:
        sub = scoped_sample_view(session, session.sample_map[sid], list(windows))
        if metric_id == "haar":
            values.append(_haar_value(sub.labels))
        elif metric_id in ("saccade_count", "mean_saccade_length"):
            values.append(saccade_stats(sub.saccades)[metric_id])
        else:
            values.append(fixation_aoi_stats(sub.labels, None, sub.scoped_duration)[metric_id])
    if not values:
        return 0.0
    return aggregate_group(values).value if len(values) > 1 else values[0].value


def _sum_transitions(
    session: Session,
    entries: Sequence[ScopedSample],
    kind: TransitionKind,
    alphabet: str,
    focus: str | None,
) -> TransitionCounts:
    total: TransitionCounts | None = None
    for e in entries:
        tc = transition_counts(
            e.labels, kind, session.aois, alphabet=alphabet, groups=session.groups, focus=focus
        )
        if total is None:
            total = tc
        else:
            total = TransitionCounts(
                kind=tc.kind, alphabet=tc.alphabet, counts=total.counts + tc.counts, focus=focus
            )
    if total is None:
        from .aoi import _transition_universe  # empty scope: zero matrix

        universe = _transition_universe(alphabet, session.aois, session.groups)  # type: ignore[arg-type]
        total = TransitionCounts(
            kind=kind, alphabet=universe, counts=np.zeros((len(universe), len(universe)), np.int64), focus=focus
        )
    return total


def _entity_labels(
    session: Session,
    dim: Dim,
    entity: str,
    entries: Sequence[ScopedSample],
    twi_entities: Sequence[Twi],
) -> list[tuple[ScopedSample, Sequence[LabeledFixation]]]:
    """Per contributing sample, the label subsequence backing one entity."""
    if dim.base is Dim.SAMPLE:
        return [(e, e.labels) for e in _sample_members(session, dim, entity, entries)]
    members = _twi_members(session, dim, entity, twi_entities)
    out: list[tuple[ScopedSample, Sequence[LabeledFixation]]] = []
    for e in entries:
        sub = scoped_sample_view(session, session.sample_map[e.sample_id], members)
        out.append((e, sub.labels))
    return out


def _entity_sequence(parts: Sequence[tuple[ScopedSample, Sequence[LabeledFixation]]], session: Session) -> list[str]:
    seq: list[str] = []
    for _e, labels in parts:
        seq.extend(aoi_sequence(labels, alphabet="aoi", collapse="per_visit", aois=session.aois))
    return seq


def _entity_density(
    parts: Sequence[tuple[ScopedSample, Sequence[LabeledFixation]]],
    session: Session,
    bounds: Rect,
) -> DensityGrid:
    fixations = [lf.fixation for _e, labels in parts for lf in labels]
    if not fixations:
        # An empty selection carries no spatial information; a flat grid
        # keeps the matrix total and mirrors the cosine zero-vector rule.
        cell = bounds.w / session.kde_params.grid_width
        gh = max(1, int(math.ceil(bounds.h / cell - 1e-9)))
        flat = np.full((gh, session.kde_params.grid_width), 1.0 / (gh * session.kde_params.grid_width))
        return DensityGrid(
            origin=(bounds.x, bounds.y),
            cell_size=cell,
            width=session.kde_params.grid_width,
            height=gh,
            mass=flat,
            total_mass=float(flat.sum()),
        )
    return density_grid(fixations, bounds, session.kde_params)


def _similarity_pair_fn(
    session: Session,
    dim: Dim,
    metric_id: str,
    entries: Sequence[ScopedSample],
    twi_entities: Sequence[Twi],
) -> Callable[[str, str], float]:
    cache: dict[str, object] = {}

    def parts_of(entity: str):
        if entity not in cache:
            cache[entity] = _entity_labels(session, dim, entity, entries, twi_entities)
        return cache[entity]

    if metric_id in ("nw", "nw_raw"):
        seqs: dict[str, list[str]] = {}

        def seq_of(entity: str) -> list[str]:
            if entity not in seqs:
                seqs[entity] = _entity_sequence(parts_of(entity), session)
            return seqs[entity]

        def pair_nw(a: str, b: str) -> float:
            score = nw_score(seq_of(a), seq_of(b), session.nw_scoring)
            return score.raw if metric_id == "nw_raw" else score.normalized

        return pair_nw

    if metric_id == "cosine":
        counts: dict[str, TransitionCounts] = {}

        def counts_of(entity: str) -> TransitionCounts:
            if entity not in counts:
                fake_entries = [
                    ScopedSample(e.sample_id, tuple(lf.fixation for lf in labels), tuple(labels), (), None, 0.0, (0.0, 0.0))
                    for e, labels in parts_of(entity)
                ]
                counts[entity] = _sum_transitions(session, fake_entries, TransitionKind.DIRECT, "aoi", None)
            return counts[entity]

        return lambda a, b: transition_cosine(counts_of(a), counts_of(b))

    # density
    bounds = dataset_bounds(session, 4.0 * session.kde_params.bandwidth)
    grids: dict[str, DensityGrid] = {}

    def grid_of(entity: str) -> DensityGrid:
        if entity not in grids:
            grids[entity] = _entity_density(parts_of(entity), session, bounds)
        return grids[entity]

    return lambda a, b: density_overlap(grid_of(a), grid_of(b))


# -- the public builder ------------------------------------------------------


def relationship_matrix(
    session: Session,
    row_dim: Dim,
    col_dim: Dim,
    metric_id: str,
    scope: Scope | None = None,
) -> MetricMatrix:
    """Fill a matrix for one (row_dim, col_dim, metric) combination.

    Supported: Sample(Group) x Aoi(Group) with the fixation/visit stats and
    haar; Aoi(Group) x Aoi(Group) with direct/indirect/glance/through:<id>;
    Sample(Group) x Sample(Group) and Twi(Group) x Twi(Group) with the
    similarity measures; Sample(Group) x Twi(Group) with scoped stats.  The
    scope (session's, unless overridden) applies before computation.
    """
    scope = scope if scope is not None else session.scope
    view = resolve_scope(session, scope)
    entries = view.entries

    if row_dim.base is Dim.SAMPLE and col_dim.base is Dim.AOI:
        if metric_id not in SAMPLE_AOI_METRICS:
            raise UnsupportedCombination(row_dim.value, col_dim.value, metric_id)
        rows = _sample_axis(session, row_dim, entries)
        cols = _aoi_axis(session, col_dim)
        values = np.zeros((len(rows), len(cols)), np.float64)
        for i, r in enumerate(rows):
            members = _sample_members(session, row_dim, r, entries)
            for j, c in enumerate(cols):
                values[i, j] = _sample_aoi_cell(session, members, _aoi_members(session, col_dim, c), metric_id)
        return MetricMatrix(row_dim, col_dim, metric_id, rows, cols, values)

    if row_dim.base is Dim.AOI and col_dim.base is Dim.AOI:
        if row_dim is not col_dim:
            raise UnsupportedCombination(row_dim.value, col_dim.value, metric_id)
        kind_name, _, focus = metric_id.partition(":")
        if kind_name == "through":
            if not focus:
                raise UnsupportedCombination(row_dim.value, col_dim.value, metric_id)
            kind = TransitionKind.THROUGH
        elif kind_name in AOI_TRANSITION_METRICS and not focus:
            kind = TransitionKind(kind_name)
            focus = None
        else:
            raise UnsupportedCombination(row_dim.value, col_dim.value, metric_id)
        alphabet = "aoi" if row_dim is Dim.AOI else "aoi_group"
        total = _sum_transitions(session, entries, kind, alphabet, focus or None)
        return MetricMatrix(
            row_dim, col_dim, metric_id, total.alphabet, total.alphabet, total.counts.astype(np.float64)
        )

    if row_dim.base is col_dim.base and row_dim.base in (Dim.SAMPLE, Dim.TWI):
        if row_dim is not col_dim or metric_id not in SIMILARITY_METRICS:
            raise UnsupportedCombination(row_dim.value, col_dim.value, metric_id)
        twi_entities = _scoped_twi_entities(session, scope) if row_dim.base is Dim.TWI else []
        if row_dim.base is Dim.SAMPLE:
            ids = _sample_axis(session, row_dim, entries)
        else:
            ids = _twi_axis(session, row_dim, twi_entities)
        if not ids:
            return MetricMatrix(row_dim, col_dim, metric_id, (), (), np.zeros((0, 0)), symmetric=True)
        pair_fn = _similarity_pair_fn(session, row_dim, metric_id, entries, twi_entities)
        m = similarity_matrix(ids, pair_fn, row_dim, metric_id)
        return m

    if row_dim.base is Dim.SAMPLE and col_dim.base is Dim.TWI:
        if metric_id not in SAMPLE_TWI_METRICS:
            raise UnsupportedCombination(row_dim.value, col_dim.value, metric_id)
        twi_entities = _scoped_twi_entities(session, scope)
        rows = _sample_axis(session, row_dim, entries)
        cols = _twi_axis(session, col_dim, twi_entities)
        values = np.zeros((len(rows), len(cols)), np.float64)
        for i, r in enumerate(rows):
            member_ids = [e.sample_id for e in _sample_members(session, row_dim, r, entries)]
            for j, c in enumerate(cols):
                windows = _twi_members(session, col_dim, c, twi_entities)
                values[i, j] = _sample_twi_cell(session, member_ids, windows, metric_id)
        return MetricMatrix(row_dim, col_dim, metric_id, rows, cols, values)

    raise UnsupportedCombination(row_dim.value, col_dim.value, metric_id)


def build_matrix(session: Session, spec: MatrixSpec, scope: Scope | None = None) -> MetricMatrix:
    """relationship_matrix plus the requested reordering applied."""
    matrix = relationship_matrix(session, spec.rows, spec.cols, spec.metric, scope)
    if spec.reorder == "global" and matrix.values.size:
        row_perm, col_perm = reorder_global(matrix)
        matrix = matrix.with_orders(row_perm, col_perm)
    return matrix
