"""Backend selection for the stencil kernel.

The compiled extension is used when it imports and ``MAXBOUND_PURE_PYTHON``
is unset or ``0``; otherwise the numpy fallback. ``MAXBOUND_THREADS`` caps the
OpenMP thread count (default 1). Both backends sum each output point in the
same stencil order; results agree to rounding and do not depend on threads.
"""

import os

from . import _kernels_py

__all__ = ["BACKEND", "stencil_apply", "thread_count", "python_stencil_apply"]

python_stencil_apply = _kernels_py.stencil_apply


def _want_pure():
    return os.environ.get("MAXBOUND_PURE_PYTHON", "0") not in ("", "0")


if _want_pure():
    _impl, BACKEND = _kernels_py.stencil_apply, "python"
else:
    try:
        from ._kernels import stencil_apply as _impl

        BACKEND = "cython"
    except ImportError:
        _impl, BACKEND = _kernels_py.stencil_apply, "python"


def thread_count():
    try:
        return max(1, int(os.environ.get("MAXBOUND_THREADS", "1")))
    except ValueError:
        return 1


def stencil_apply(f4, offsets, weights):
    """Apply a sparse stencil to a 4-d C-contiguous float array with the selected backend."""
    return _impl(f4, offsets, weights, thread_count())
