"""JIT-compiled kernels: the loop implementations compiled by numba."""

from __future__ import annotations

from numba import njit

from . import _loops

idt_spans = njit(cache=True)(_loops.idt_spans)
nw_raw = njit(cache=True)(_loops.nw_raw)
kde_grid = njit(cache=True)(_loops.kde_grid)
points_in_polygon = njit(cache=True)(_loops.points_in_polygon)
advect = njit(cache=True)(_loops.advect)
