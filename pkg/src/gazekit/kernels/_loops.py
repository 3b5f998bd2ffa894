"""Loop-form kernel implementations.

Every function here is written in the nopython subset so the numba backend
can compile it unchanged; the numpy backend reuses the cheap ones directly
and replaces the grid/advection loops with vectorized equivalents.
Array arguments are float64 unless stated otherwise.
"""

from __future__ import annotations

import numpy as np


def idt_spans(t, x, y, threshold, min_duration):
    """Dispersion-threshold sweep over one point stream.

    Grows [i, j) while (max x - min x) + (max y - min y) stays <= threshold,
    emits the window iff t[j-1] - t[i] >= min_duration, then restarts at j.
    Returns (starts, stops) as int64 arrays; stops are exclusive.
    """
    n = t.shape[0]
    starts = np.empty(n, np.int64)
    stops = np.empty(n, np.int64)
    count = 0
    i = 0
    while i < n:
        minx = x[i]
        maxx = x[i]
        miny = y[i]
        maxy = y[i]
        j = i + 1
        while j < n:
            nminx = min(minx, x[j])
            nmaxx = max(maxx, x[j])
            nminy = min(miny, y[j])
            nmaxy = max(maxy, y[j])
            if (nmaxx - nminx) + (nmaxy - nminy) > threshold:
                break
            minx = nminx
            maxx = nmaxx
            miny = nminy
            maxy = nmaxy
            j += 1
        if t[j - 1] - t[i] >= min_duration:
            starts[count] = i
            stops[count] = j
            count += 1
        i = j
    return starts[:count], stops[:count]


def nw_raw(a, b, match, mismatch, gap):
    """Optimal global-alignment score of two int32 symbol arrays."""
    m = a.shape[0]
    n = b.shape[0]
    prev = np.empty(n + 1, np.float64)
    cur = np.empty(n + 1, np.float64)
    for j in range(n + 1):
        prev[j] = gap * j
    for i in range(1, m + 1):
        cur[0] = gap * i
        ai = a[i - 1]
        for j in range(1, n + 1):
            s = match if ai == b[j - 1] else mismatch
            best = prev[j - 1] + s
            v = prev[j] + gap
            if v > best:
                best = v
            v = cur[j - 1] + gap
            if v > best:
                best = v
            cur[j] = best
        tmp = prev
        prev = cur
        cur = tmp
    return prev[n]


def kde_grid(cx, cy, weights, ox, oy, cell, gw, gh, bandwidth, kind):
    """Accumulate kernel mass on a (gh, gw) grid of cell centers.

    kind 0 = Gaussian, 1 = Epanechnikov.  Normalization constants are left
    out; the caller renormalizes the grid to unit mass anyway.
    """
    grid = np.zeros((gh, gw), np.float64)
    inv2h2 = 1.0 / (2.0 * bandwidth * bandwidth)
    invh2 = 1.0 / (bandwidth * bandwidth)
    for f in range(cx.shape[0]):
        fx = cx[f]
        fy = cy[f]
        wf = weights[f]
        for iy in range(gh):
            yc = oy + (iy + 0.5) * cell
            dy2 = (yc - fy) * (yc - fy)
            for ix in range(gw):
                xc = ox + (ix + 0.5) * cell
                d2 = (xc - fx) * (xc - fx) + dy2
                if kind == 0:
                    grid[iy, ix] += wf * np.exp(-d2 * inv2h2)
                else:
                    u2 = d2 * invh2
                    if u2 < 1.0:
                        grid[iy, ix] += wf * (1.0 - u2)
    return grid


def points_in_polygon(px, py, vx, vy):
    """Even-odd containment with inclusive boundary, one bool per point."""
    n = px.shape[0]
    nv = vx.shape[0]
    out = np.zeros(n, np.bool_)
    for k in range(n):
        qx = px[k]
        qy = py[k]
        inside = False
        on_edge = False
        j = nv - 1
        for i in range(nv):
            x1 = vx[j]
            y1 = vy[j]
            x2 = vx[i]
            y2 = vy[i]
            cross = (x2 - x1) * (qy - y1) - (y2 - y1) * (qx - x1)
            if (
                cross == 0.0
                and min(x1, x2) <= qx
                and qx <= max(x1, x2)
                and min(y1, y2) <= qy
                and qy <= max(y1, y2)
            ):
                on_edge = True
                break
            if (y1 > qy) != (y2 > qy):
                xint = x1 + (qy - y1) / (y2 - y1) * (x2 - x1)
                if qx < xint:
                    inside = not inside
            j = i
        out[k] = inside or on_edge
    return out


def advect(px, py, compat, bandwidth):
    """One mean-shift step of all interior control points.

    px, py: (S, P) control points of S polylines; compat: (S, S) bool saying
    which polylines attract each other (always including self).  Endpoints
    (columns 0 and P-1) are pinned.  Returns new (S, P) arrays.
    """
    S, P = px.shape
    out_x = px.copy()
    out_y = py.copy()
    inv2h2 = 1.0 / (2.0 * bandwidth * bandwidth)
    for s in range(S):
        for p in range(1, P - 1):
            qx = px[s, p]
            qy = py[s, p]
            num_x = 0.0
            num_y = 0.0
            den = 0.0
            for s2 in range(S):
                if not compat[s, s2]:
                    continue
                for p2 in range(P):
                    dx = px[s2, p2] - qx
                    dy = py[s2, p2] - qy
                    w = np.exp(-(dx * dx + dy * dy) * inv2h2)
                    num_x += w * px[s2, p2]
                    num_y += w * py[s2, p2]
                    den += w
            if den > 0.0:
                out_x[s, p] = num_x / den
                out_y[s, p] = num_y / den
    return out_x, out_y
