"""Hot numeric kernels with a compiled and a pure-numpy implementation.

The compiled (numba) backend is the default.  Set ``GAZEKIT_DISABLE_NUMBA=1``
to force the numpy fallback; it is also selected automatically when numba is
not importable.  ``BACKEND`` names the active implementation.
"""

from __future__ import annotations

import os

__all__ = [
    "BACKEND",
    "advect",
    "idt_spans",
    "kde_grid",
    "nw_raw",
    "points_in_polygon",
    "warmup",
]


def _numba_disabled() -> bool:
    return os.environ.get("GAZEKIT_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")


BACKEND = "numpy"
if not _numba_disabled():
    try:
        from .numba_backend import advect, idt_spans, kde_grid, nw_raw, points_in_polygon

        BACKEND = "numba"
    except ImportError:
        pass

if BACKEND == "numpy":
    from .numpy_backend import advect, idt_spans, kde_grid, nw_raw, points_in_polygon


def warmup() -> str:
    """Run every kernel once on tiny inputs (triggers JIT compilation)."""
    import numpy as np

    t = np.array([0.0, 10.0, 20.0])
    z = np.array([0.0, 1.0, 2.0])
    idt_spans(t, z, z, 5.0, 10.0)
    nw_raw(np.array([0, 1], np.int32), np.array([0, 2], np.int32), 1.0, -1.0, -1.0)
    kde_grid(z[:1], z[:1], np.ones(1), 0.0, 0.0, 1.0, 4, 4, 1.0, 0)
    kde_grid(z[:1], z[:1], np.ones(1), 0.0, 0.0, 1.0, 4, 4, 1.0, 1)
    points_in_polygon(z[:1], z[:1], np.array([0.0, 2.0, 1.0]), np.array([0.0, 0.0, 2.0]))
    pts = np.array([[0.0, 1.0, 2.0]])
    advect(pts, pts, np.ones((1, 1), np.bool_), 1.0)
    return BACKEND
