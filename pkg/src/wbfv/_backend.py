"""Numba/numpy backend selection.

Hot kernels (stationary-profile marching, banded LU) exist in two flavors: a
numba ``@njit`` per-cell version and a vectorized pure-numpy fallback.  The
fallback is selected automatically when numba is not importable, or forced by
setting the environment variable ``WBFV_NO_NUMBA=1`` before import.  Both
flavors stay importable so they can be cross-checked and benchmarked
(``benchmarks/bench_backends.py``).
"""

import os

_FORCED_OFF = os.environ.get("WBFV_NO_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _FORCED_OFF:
        raise ImportError
    from numba import njit

    NUMBA_ENABLED = True
except ImportError:
    NUMBA_ENABLED = False

    def njit(*args, **kwargs):
        """Identity decorator standing in for numba.njit."""
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap


def backend_name():
    """Return the active kernel backend, ``"numba"`` or ``"numpy"``."""
    return "numba" if NUMBA_ENABLED else "numpy"
