"""Attention-density estimation on a regular grid.

Mass at each cell center is the kernel-weighted sum over fixation
centroids, truncated at the grid bounds and renormalized to total 1, so
grids of equal geometry are directly comparable by histogram intersection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .errors import EmptySelection
from .model import DensityGrid, Fixation, Rect, fmt_num

__all__ = ["KdeParams", "density_grid", "serialize_density_tsv"]

_KERNELS = {"gaussian": 0, "epanechnikov": 1}


@dataclass(frozen=True)
class KdeParams:
    kernel: str = "gaussian"  # gaussian | epanechnikov
    bandwidth: float = 30.0  # stimulus units
    grid_width: int = 256  # cells; height follows the bounds aspect
    weighting: str = "by_duration"  # uniform | by_duration

    def __post_init__(self) -> None:
        if self.kernel not in _KERNELS:
            raise ValueError(f"kernel must be one of {sorted(_KERNELS)}, got {self.kernel!r}")
        if not (math.isfinite(self.bandwidth) and self.bandwidth > 0):
            raise ValueError(f"bandwidth must be finite and > 0, got {self.bandwidth}")
        if self.grid_width < 8:
            raise ValueError(f"grid_width must be >= 8, got {self.grid_width}")
        if self.weighting not in ("uniform", "by_duration"):
            raise ValueError(f"weighting must be uniform|by_duration, got {self.weighting!r}")


def density_grid(
    fixations: Sequence[Fixation], bounds: Rect, params: KdeParams = KdeParams()
) -> DensityGrid:
    """Normalized attention grid over ``bounds``.

    Cell size comes from grid_width; the cell row count follows the bounds
    aspect ratio.  Weights are 1 (uniform) or the fixation duration.  When
    every kernel evaluation underflows to zero the grid degrades to uniform
    mass, keeping the normalization contract.
    """
    if not fixations:
        raise EmptySelection("density grid of an empty fixation set")
    cell = bounds.w / params.grid_width
    gh = max(1, int(math.ceil(bounds.h / cell - 1e-9)))
    cx = np.array([f.cx for f in fixations], dtype=np.float64)
    cy = np.array([f.cy for f in fixations], dtype=np.float64)
    if params.weighting == "by_duration":
        weights = np.array([f.duration for f in fixations], dtype=np.float64)
        if not weights.any():
            weights = np.ones(len(fixations), dtype=np.float64)
    else:
        weights = np.ones(len(fixations), dtype=np.float64)
    mass = kernels.kde_grid(
        cx,
        cy,
        weights,
        float(bounds.x),
        float(bounds.y),
        float(cell),
        int(params.grid_width),
        int(gh),
        float(params.bandwidth),
        _KERNELS[params.kernel],
    )
    total = float(mass.sum())
    if total > 0.0:
        mass = mass / total
    else:
        mass = np.full((gh, params.grid_width), 1.0 / (gh * params.grid_width))
    return DensityGrid(
        origin=(float(bounds.x), float(bounds.y)),
        cell_size=float(cell),
        width=int(params.grid_width),
        height=int(gh),
        mass=mass,
        total_mass=float(mass.sum()),
    )


def serialize_density_tsv(grid: DensityGrid) -> bytes:
    """x_cell, y_cell, mass rows (zero cells skipped); pair with the JSON
    header (origin/cell_size/dims) for reconstruction."""
    lines = ["x_cell\ty_cell\tmass"]
    ys, xs = np.nonzero(grid.mass)
    for iy, ix in zip(ys.tolist(), xs.tolist()):
        lines.append(f"{ix}\t{iy}\t{fmt_num(float(grid.mass[iy, ix]))}")
    return ("\n".join(lines) + "\n").encode("utf-8")
