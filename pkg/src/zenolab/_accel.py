"""Numba switch.

Set ``ZENO_LAB_DISABLE_NUMBA=1`` to force the pure-numpy kernels.  The flag is
read once, at import time.  ``ZENO_LAB_THREADS`` caps numba's thread pool.
"""
import os

_FALSY = ("", "0", "false", "no", "off")

DISABLED = os.environ.get("ZENO_LAB_DISABLE_NUMBA", "").strip().lower() not in _FALSY

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None
else:
    if "NUMBA_THREADING_LAYER" not in os.environ:
        # the system TBB is too old for numba; skip the probe and its warning
        _numba.config.THREADING_LAYER = "workqueue"

USE_NUMBA = _numba is not None and not DISABLED

prange = _numba.prange if _numba is not None else range


def njit(*args, **kwargs):
    """``numba.njit`` when numba is active, identity otherwise."""
    if _numba is None:
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda func: func
    return _numba.njit(*args, **kwargs)


def set_threads(n=None):
    if n is None:
        raw = os.environ.get("ZENO_LAB_THREADS")
        if not raw:
            return
        n = int(raw)
    if _numba is not None and n > 0:
        _numba.set_num_threads(min(n, _numba.config.NUMBA_NUM_THREADS))


set_threads()
