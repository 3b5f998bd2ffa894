"""Dispersion-threshold fixation detection and saccade derivation.

The sweep grows a point window while its dispersion, (max x - min x) +
(max y - min y), stays within the threshold; a window is emitted as a
fixation iff it spans at least the minimum duration.  Windows are consumed
left to right with no back-off, so the result is deterministic and the
emitted point spans are disjoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .errors import EmptyWindow
from .model import Fixation, GazeSample, Saccade

__all__ = [
    "DetectionParams",
    "derive_saccades",
    "detect_fixations",
    "dispersion",
]


@dataclass(frozen=True)
class DetectionParams:
    dispersion_threshold: float = 25.0  # stimulus units
    min_duration: float = 100.0  # ms

    def __post_init__(self) -> None:
        for name in ("dispersion_threshold", "min_duration"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and > 0, got {v}")


def dispersion(points: Sequence[tuple[float, float]] | np.ndarray) -> float:
    """(max x - min x) + (max y - min y) over a point window."""
    arr = np.asarray(points, dtype=np.float64)
    if arr.size == 0:
        raise EmptyWindow("dispersion of an empty window")
    arr = arr.reshape(-1, 2)
    x = arr[:, 0]
    y = arr[:, 1]
    return float((x.max() - x.min()) + (y.max() - y.min()))


def detect_fixations(sample: GazeSample, params: DetectionParams = DetectionParams()) -> list[Fixation]:
    if sample.n_points == 0:
        return []
    starts, stops = kernels.idt_spans(
        sample.t, sample.x, sample.y, float(params.dispersion_threshold), float(params.min_duration)
    )
    out: list[Fixation] = []
    for k in range(len(starts)):
        i = int(starts[k])
        j = int(stops[k])
        out.append(
            Fixation(
                index=k,
                cx=float(np.mean(sample.x[i:j])),
                cy=float(np.mean(sample.y[i:j])),
                t_start=float(sample.t[i]),
                t_end=float(sample.t[j - 1]),
                duration=float(sample.t[j - 1] - sample.t[i]),
                point_span=(i, j),
            )
        )
    return out


def derive_saccades(fixations: Sequence[Fixation]) -> list[Saccade]:
    """One saccade per consecutive fixation pair (n-1 for n fixations)."""
    return [Saccade.between(a, b) for a, b in zip(fixations, fixations[1:])]
