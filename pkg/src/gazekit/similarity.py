"""Pairwise similarity measures and symmetric matrix assembly.

Three measures: optimal global alignment of AOI visit sequences, cosine of
transition-count vectors, and histogram intersection of normalized density
grids.  All three give 1.0 on identical inputs, so similarity matrices have
unit diagonals.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .aoi import TransitionCounts
from .errors import AlphabetMismatch, GeometryMismatch
from .model import DensityGrid, Dim, MetricMatrix

__all__ = [
    "NwScore",
    "NwScoring",
    "density_overlap",
    "nw_score",
    "similarity_matrix",
    "transition_cosine",
]


@dataclass(frozen=True)
class NwScoring:
    match: float = 1.0
    mismatch: float = -1.0
    gap: float = -1.0

    def __post_init__(self) -> None:
        if not (self.match > self.mismatch):
            raise ValueError("match must exceed mismatch")
        if not (self.gap < self.match):
            raise ValueError("gap must be below match")


@dataclass(frozen=True)
class NwScore:
    raw: float
    normalized: float


def nw_score(
    seq_a: Sequence[str], seq_b: Sequence[str], scoring: NwScoring = NwScoring()
) -> NwScore:
    """Needleman-Wunsch global alignment score.

    normalized = raw / (match * max(|a|, |b|)); two empty sequences align
    perfectly by convention (raw 0, normalized 1).
    """
    m, n = len(seq_a), len(seq_b)
    if m == 0 and n == 0:
        return NwScore(raw=0.0, normalized=1.0)
    vocab: dict[str, int] = {}
    for s in seq_a:
        vocab.setdefault(s, len(vocab))
    for s in seq_b:
        vocab.setdefault(s, len(vocab))
    a = np.array([vocab[s] for s in seq_a], dtype=np.int32)
    b = np.array([vocab[s] for s in seq_b], dtype=np.int32)
    raw = float(kernels.nw_raw(a, b, float(scoring.match), float(scoring.mismatch), float(scoring.gap)))
    return NwScore(raw=raw, normalized=raw / (scoring.match * max(m, n)))


def transition_cosine(counts_a: TransitionCounts, counts_b: TransitionCounts) -> float:
    """Cosine of the flattened off-diagonal transition vectors.

    Two all-zero matrices are maximally similar (1.0); exactly one all-zero
    gives 0.0.
    """
    if not counts_a.same_alphabet(counts_b):
        raise AlphabetMismatch(
            f"cannot compare {counts_a.kind.value} over {counts_a.alphabet} "
            f"with {counts_b.kind.value} over {counts_b.alphabet}"
        )
    va = counts_a.flat_offdiag()
    vb = counts_b.flat_offdiag()
    na = float(np.linalg.norm(va))
    nb = float(np.linalg.norm(vb))
    if na == 0.0 and nb == 0.0:
        return 1.0
    if na == 0.0 or nb == 0.0:
        return 0.0
    return min(1.0, max(0.0, float(np.dot(va, vb)) / (na * nb)))


def density_overlap(grid_a: DensityGrid, grid_b: DensityGrid) -> float:
    """Histogram intersection of two normalized grids on one geometry."""
    if not grid_a.same_geometry(grid_b):
        raise GeometryMismatch(
            f"grid geometries differ: {grid_a.origin}/{grid_a.cell_size}/{grid_a.width}x{grid_a.height}"
            f" vs {grid_b.origin}/{grid_b.cell_size}/{grid_b.width}x{grid_b.height}"
        )
    return float(np.minimum(grid_a.mass, grid_b.mass).sum())


def similarity_matrix(
    entity_ids: Sequence[str],
    pair_fn: Callable[[str, str], float],
    dim: Dim,
    metric_id: str,
) -> MetricMatrix:
    """Symmetric matrix of pair_fn over entities (scope baked into pair_fn).

    Cells are computed once per unordered pair and mirrored; the diagonal is
    pair_fn(x, x) so self-similarity conventions stay visible.
    """
    if not entity_ids:
        raise ValueError("similarity_matrix needs at least one entity")
    k = len(entity_ids)
    values = np.zeros((k, k), dtype=np.float64)
    for i in range(k):
        values[i, i] = pair_fn(entity_ids[i], entity_ids[i])
        for j in range(i + 1, k):
            v = pair_fn(entity_ids[i], entity_ids[j])
            values[i, j] = v
            values[j, i] = v
    return MetricMatrix(
        row_dim=dim,
        col_dim=dim,
        metric_id=metric_id,
        row_ids=tuple(entity_ids),
        col_ids=tuple(entity_ids),
        values=values,
        symmetric=True,
    )
