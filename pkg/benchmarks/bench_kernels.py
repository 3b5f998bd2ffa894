"""Time the compiled kernels against the pure-numpy fallback.

Run:  python3 benchmarks/bench_kernels.py [--repeat N] [--scale F]

Each kernel runs on one representative workload; the table reports the best
wall time per backend and the speedup.  Results are cross-checked between
backends before timing, so a reported speedup is never from a wrong answer.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from gazekit.kernels import numpy_backend

try:
    from gazekit.kernels import numba_backend
except ImportError:
    numba_backend = None


def best_time(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def workloads(scale):
    rng = np.random.default_rng(7)

    n = int(120_000 * scale)
    anchors = rng.uniform(0, 1000, 40)
    idx = np.sort(rng.integers(0, 40, n))
    idt_args = (
        np.cumsum(rng.uniform(5, 30, n)),
        anchors[idx] + rng.normal(0, 5, n),
        anchors[idx] + rng.normal(0, 5, n),
        25.0,
        100.0,
    )

    m = int(500 * scale)
    nw_args = (
        rng.integers(0, 6, m).astype(np.int32),
        rng.integers(0, 6, m).astype(np.int32),
        1.0,
        -1.0,
        -1.0,
    )

    k = int(60_000 * scale)
    angles = np.linspace(0.0, 2.0 * np.pi, 13)[:-1]
    radius = np.where(np.arange(12) % 2 == 0, 200.0, 80.0)
    poly_args = (
        rng.uniform(-250, 250, k),
        rng.uniform(-250, 250, k),
        radius * np.cos(angles),
        radius * np.sin(angles),
    )

    nfix = int(1_500 * scale)
    gw, gh = 192, 128
    kde_args = (
        rng.uniform(0, 1000, nfix),
        rng.uniform(0, 600, nfix),
        rng.uniform(50, 400, nfix),
        0.0,
        0.0,
        1000.0 / gw,
        gw,
        gh,
        30.0,
        0,  # gaussian
    )

    segs = int(80 * scale)
    px = np.linspace(0, 1, 15)[None, :] * rng.uniform(100, 900, segs)[:, None]
    py = px * 0.5 + rng.uniform(0, 50, segs)[:, None]
    compat = rng.uniform(size=(segs, segs)) < 0.4
    np.fill_diagonal(compat, True)
    advect_args = (px, py, compat, 30.0)

    return {
        "idt_spans": idt_args,
        "nw_raw": nw_args,
        "points_in_polygon": poly_args,
        "kde_grid": kde_args,
        "advect": advect_args,
    }


def check_agreement(name, a, b):
    if isinstance(a, tuple):
        return all(check_agreement(name, x, y) for x, y in zip(a, b))
    if a.dtype == np.bool_ or np.issubdtype(a.dtype, np.integer):
        return np.array_equal(a, b)
    return np.allclose(a, b, rtol=1e-9, atol=1e-12)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3, help="timing repetitions, best wins")
    parser.add_argument("--scale", type=float, default=1.0, help="workload size multiplier")
    args = parser.parse_args()

    loads = workloads(args.scale)
    print(f"{'kernel':<20}{'numpy':>12}{'numba':>12}{'speedup':>10}")
    for name, call_args in loads.items():
        np_fn = getattr(numpy_backend, name)
        np_result = np_fn(*call_args)
        row = f"{name:<20}"
        t_np = best_time(np_fn, call_args, args.repeat)
        row += f"{t_np * 1e3:>10.1f}ms"
        if numba_backend is None:
            print(row + f"{'n/a':>12}{'n/a':>10}")
            continue
        nb_fn = getattr(numba_backend, name)
        nb_result = nb_fn(*call_args)  # first call compiles
        if not check_agreement(name, np_result, nb_result):
            raise SystemExit(f"{name}: backends disagree, refusing to time")
        t_nb = best_time(nb_fn, call_args, args.repeat)
        row += f"{t_nb * 1e3:>10.1f}ms{t_np / t_nb:>9.1f}x"
        print(row)
    if numba_backend is None:
        print("numba backend unavailable (GAZEKIT_DISABLE_NUMBA set or numba missing)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
