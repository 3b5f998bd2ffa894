"""Pure-numpy kernels, used when numba is disabled or unavailable.

The sequential sweeps (I-DT, alignment DP, polygon test) have loop-carried
state and stay in plain Python; the grid accumulation and bundling advection
are rewritten as vectorized array expressions.  Results match the compiled
backend exactly for the sequential kernels and to float tolerance for the
vectorized ones (summation order differs).
"""

from __future__ import annotations

import numpy as np

from ._loops import idt_spans, nw_raw, points_in_polygon

__all__ = ["advect", "idt_spans", "kde_grid", "nw_raw", "points_in_polygon"]


def kde_grid(cx, cy, weights, ox, oy, cell, gw, gh, bandwidth, kind):
    xs = ox + (np.arange(gw, dtype=np.float64) + 0.5) * cell
    ys = oy + (np.arange(gh, dtype=np.float64) + 0.5) * cell
    grid = np.zeros((gh, gw), np.float64)
    inv2h2 = 1.0 / (2.0 * bandwidth * bandwidth)
    invh2 = 1.0 / (bandwidth * bandwidth)
    # Fixation-major accumulation, same as the compiled loop.
    for f in range(len(cx)):
        dx2 = (xs - cx[f]) ** 2
        dy2 = (ys - cy[f]) ** 2
        d2 = dy2[:, None] + dx2[None, :]
        if kind == 0:
            grid += weights[f] * np.exp(-d2 * inv2h2)
        else:
            k = 1.0 - d2 * invh2
            np.maximum(k, 0.0, out=k)
            grid += weights[f] * k
    return grid


def advect(px, py, compat, bandwidth):
    S, P = px.shape
    out_x = px.copy()
    out_y = py.copy()
    inv2h2 = 1.0 / (2.0 * bandwidth * bandwidth)
    for s in range(S):
        mask = compat[s]
        if not mask.any():
            continue
        qx = px[mask].ravel()
        qy = py[mask].ravel()
        ix = px[s, 1:-1][:, None]
        iy = py[s, 1:-1][:, None]
        w = np.exp(-((qx[None, :] - ix) ** 2 + (qy[None, :] - iy) ** 2) * inv2h2)
        den = w.sum(axis=1)
        keep = den > 0.0
        new_x = np.where(keep, (w @ qx) / np.where(keep, den, 1.0), px[s, 1:-1])
        new_y = np.where(keep, (w @ qy) / np.where(keep, den, 1.0), py[s, 1:-1])
        out_x[s, 1:-1] = new_x
        out_y[s, 1:-1] = new_y
    return out_x, out_y
