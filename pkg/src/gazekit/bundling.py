"""Direction-aware saccade bundling.

Kernel-density edge bundling: each saccade segment is subdivided into
control points which iteratively climb the density field of all
direction-compatible saccades (mean-shift advection), then relax toward
straightness (Laplacian smoothing).  Endpoints never move.  Saccades whose
directions differ by at least the split angle ignore each other, so
opposing flows stay visually separate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels

__all__ = ["BundleParams", "SUBDIVISION_POINTS", "bundle_saccades"]

# Odd count so every polyline has a true midpoint vertex.
SUBDIVISION_POINTS = 15

Segment = tuple[tuple[float, float], tuple[float, float]]


@dataclass(frozen=True)
class BundleParams:
    iterations: int = 10
    kernel_bandwidth: float = 30.0  # stimulus units
    smoothing: float = 0.25  # [0, 1] Laplacian blend per iteration
    direction_split_deg: float = 45.0

    def __post_init__(self) -> None:
        if self.iterations < 0:
            raise ValueError(f"iterations must be >= 0, got {self.iterations}")
        if not (math.isfinite(self.kernel_bandwidth) and self.kernel_bandwidth > 0):
            raise ValueError(f"kernel_bandwidth must be finite and > 0, got {self.kernel_bandwidth}")
        if not 0.0 <= self.smoothing <= 1.0:
            raise ValueError(f"smoothing must be in [0, 1], got {self.smoothing}")
        if not 0.0 < self.direction_split_deg <= 180.0:
            raise ValueError(f"direction_split_deg must be in (0, 180], got {self.direction_split_deg}")


def _compatibility(segments: Sequence[Segment], split_deg: float) -> np.ndarray:
    angles = np.array(
        [math.atan2(b[1] - a[1], b[0] - a[0]) for a, b in segments], dtype=np.float64
    )
    diff = np.abs(angles[:, None] - angles[None, :]) % (2.0 * math.pi)
    diff = np.minimum(diff, 2.0 * math.pi - diff)
    return diff < math.radians(split_deg)


def bundle_saccades(segments: Sequence[Segment], params: BundleParams = BundleParams()) -> list[np.ndarray]:
    """Bundle segments into polylines, one (P, 2) array per input segment.

    iterations = 0 returns the untouched 2-point segments.  First and last
    vertices always equal the input endpoints exactly.
    """
    if not segments:
        return []
    if params.iterations == 0:
        return [np.array([a, b], dtype=np.float64) for a, b in segments]

    S = len(segments)
    P = SUBDIVISION_POINTS
    ts = np.linspace(0.0, 1.0, P)
    px = np.empty((S, P), dtype=np.float64)
    py = np.empty((S, P), dtype=np.float64)
    for s, (a, b) in enumerate(segments):
        px[s] = a[0] + (b[0] - a[0]) * ts
        py[s] = a[1] + (b[1] - a[1]) * ts
        # linspace endpoints are exact, but pin anyway against fp drift
        px[s, 0], py[s, 0] = a
        px[s, -1], py[s, -1] = b

    compat = _compatibility(segments, params.direction_split_deg)
    alpha = params.smoothing
    for _ in range(params.iterations):
        px, py = kernels.advect(px, py, compat, float(params.kernel_bandwidth))
        if alpha > 0.0:
            mid_x = 0.5 * (px[:, :-2] + px[:, 2:])
            mid_y = 0.5 * (py[:, :-2] + py[:, 2:])
            px[:, 1:-1] += alpha * (mid_x - px[:, 1:-1])
            py[:, 1:-1] += alpha * (mid_y - py[:, 1:-1])

    out: list[np.ndarray] = []
    for s, (a, b) in enumerate(segments):
        poly = np.column_stack([px[s], py[s]])
        poly[0] = a
        poly[-1] = b
        out.append(poly)
    return out
