"""Compiled vs pure-Python kernels on the workloads the library actually runs.

    python benchmarks/bench_kernels.py [--quick]
"""
import argparse
import time

import numpy as np

from sadic import cf
from sadic.kernels import _pykernels as py
from sadic.lyapunov import _float_stack

try:
    from sadic.kernels import _ckernels as cy
except ImportError:
    cy = None


def _time(fn, *a, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*a)
        best = min(best, time.perf_counter() - t0)
    return best, out


def _parts(out):
    return out if isinstance(out, tuple) else (out,)


def workloads(scale):
    rng = np.random.default_rng(0)
    n = 20_000 * scale
    idx = rng.integers(0, 3, n).astype(np.int64)
    mats = _float_stack([m for m in cf.BRUN_MATRICES])
    word = rng.integers(0, 3, 5_000 * scale).astype(np.uint8)
    pts = rng.uniform(-1, 1, (20_000 * scale, 3))
    q = rng.uniform(-1, 1, (2_000 * scale, 3))
    yield "vec_log_growth", lambda k: k.vec_log_growth(idx, mats, np.ones(3), 100)
    yield "mat_log_growth", lambda k: k.mat_log_growth(idx, mats, True, 100)
    yield "brun_digits", lambda k: k.brun_digits(0.3, 0.7, 100 * scale)
    yield "window_extrema", lambda k: k.window_extrema(word, 3, 100)

    from sadic.spatial import GridIndex
    g = GridIndex(pts, 0.05)
    yield "grid_query", lambda k: g.count(q, 0.05, backend=k)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()
    scale = 1 if args.quick else 5
    print(f"{'kernel':<16}{'python s':>12}{'cython s':>12}{'speedup':>10}")
    for name, run in workloads(scale):
        tp, op = _time(run, py, repeat=1)
        if cy is None:
            print(f"{name:<16}{tp:>12.4f}{'n/a':>12}{'':>10}")
            continue
        tc, oc = _time(run, cy)
        same = all(np.allclose(a, b) for a, b in zip(_parts(op), _parts(oc)))
        print(f"{name:<16}{tp:>12.4f}{tc:>12.4f}{tp / tc:>9.1f}x{'' if same else '  MISMATCH'}")


if __name__ == "__main__":
    main()
