"""Pure-numpy fallback for the sparse-stencil kernel."""

import numpy as np


def _window(offset, size):
    # destination and source slices for a shift by ``offset`` along one axis
    if offset >= 0:
        return slice(0, max(size - offset, 0)), slice(offset, size)
    return slice(-offset, size), slice(0, max(size + offset, 0))


def stencil_apply(f, offsets, weights, nthreads=1):
    """``out[x] = sum_s weights[s] * f[x + offsets[s]]``, reading zero outside the array.

    Same contract as the compiled kernel; ``nthreads`` is accepted and ignored.
    """
    f = np.ascontiguousarray(f, dtype=float)
    out = np.zeros_like(f)
    for off, w in zip(np.asarray(offsets), np.asarray(weights)):
        dst, src = zip(*(_window(int(o), n) for o, n in zip(off, f.shape)))
        out[dst] += w * f[src]
    return out
