"""Numba switch.

Hot kernels are compiled with numba unless ``QPUF_NUMBA=0`` is set in the
environment, in which case the pure-numpy implementations are used.  The
flag is read once at import time.
"""

import os
import warnings

_FLAG = os.environ.get("QPUF_NUMBA", "1").strip().lower()
USE_NUMBA = _FLAG not in {"0", "false", "no", "off"}

numba = None
if USE_NUMBA:
    try:
        import numba  # noqa: F811
    except ImportError:  # pragma: no cover - numba is a declared dependency
        warnings.warn("numba not importable; falling back to numpy kernels")
        USE_NUMBA = False
    else:
        # skip probing an outdated TBB; the choice does not affect results
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]


def njit(*args, **kwargs):
    """``numba.njit`` with caching on by default; identity when disabled."""
    kwargs.setdefault("cache", True)
    if USE_NUMBA:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]):
        return args[0]
    return lambda fn: fn


def set_threads(n):
    if USE_NUMBA and n:
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
