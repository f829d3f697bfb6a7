"""Time the compiled stencil kernel against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat 5] [--threads 1]

Stencils are the sphere and ball factor stencils used by the maximal
operators, applied to a random 4-d grid of the size a 2+2 comparison uses.
"""

import argparse
import os
import time

import numpy as np

from maxbound import kernels
from maxbound.maximal_grid import factor_stencil

try:
    from maxbound._kernels import stencil_apply as compiled
except ImportError:
    compiled = None


def _embed(offsets, axes):
    full = np.zeros((len(offsets), 4), dtype=np.int64)
    full[:, axes] = offsets
    return full


def cases():
    yield "sphere d=2 r=4", (64, 64, 1, 1), (0, 1), factor_stencil("sphere", 2, 4.0)
    yield "ball d=2 r=4", (64, 64, 1, 1), (0, 1), factor_stencil("ball", 2, 4.0)
    yield "sphere d=2 r=3 on 2+2", (17, 17, 17, 17), (0, 1), factor_stencil("sphere", 2, 3.0)
    yield "ball d=2 r=3 on 2+2", (17, 17, 17, 17), (2, 3), factor_stencil("ball", 2, 3.0)
    yield "sphere d=3 r=3", (32, 32, 32, 1), (0, 1, 2), factor_stencil("sphere", 3, 3.0)


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--threads", type=int, default=int(os.environ.get("MAXBOUND_THREADS", "1")))
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"selected backend: {kernels.BACKEND}")
    print(f"{'case':26s} {'points':>8s} {'taps':>6s} {'numpy [ms]':>11s} {'cython [ms]':>12s} {'speedup':>8s} {'max diff':>9s}")
    for name, shape, axes, (offs, w) in cases():
        f = np.ascontiguousarray(rng.random(shape))
        full = _embed(offs, list(axes))
        ref = kernels.python_stencil_apply(f, full, w, 1)
        t_py = best_time(lambda: kernels.python_stencil_apply(f, full, w, 1), args.repeat)
        if compiled is None:
            print(f"{name:26s} {f.size:8d} {len(w):6d} {1e3 * t_py:11.2f} {'n/a':>12s} {'n/a':>8s} {'n/a':>9s}")
            continue
        out = compiled(f, full, w, args.threads)
        t_c = best_time(lambda: compiled(f, full, w, args.threads), args.repeat)
        diff = float(np.abs(out - ref).max())
        print(f"{name:26s} {f.size:8d} {len(w):6d} {1e3 * t_py:11.2f} {1e3 * t_c:12.2f} {t_py / t_c:8.1f} {diff:9.1e}")


if __name__ == "__main__":
    main()
