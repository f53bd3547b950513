"""Kernel backend selection.

The hot numerical loops (ODE integration, quadrature, the stochastic
ensemble) are compiled with numba by default.  Setting the environment
variable ``RADTRAP_NO_NUMBA=1`` before import selects a pure numpy/Python
fallback path instead; ``benchmarks/bench_backends.py`` compares the two.

``RADTRAP_THREADS`` caps the number of threads numba may use for the
parallel ensemble kernel.
"""

import os

_TRUTHY = ("1", "true", "yes", "on")

NUMBA_ENABLED = os.environ.get("RADTRAP_NO_NUMBA", "").lower() not in _TRUTHY

if NUMBA_ENABLED:
    try:
        import numba

        def njit(*args, **kwargs):
            kwargs.setdefault("cache", True)
            return numba.njit(*args, **kwargs)

        _threads = os.environ.get("RADTRAP_THREADS")
        if _threads:
            numba.set_num_threads(max(1, min(int(_threads), numba.config.NUMBA_NUM_THREADS)))
    except ImportError:
        NUMBA_ENABLED = False

if not NUMBA_ENABLED:
    def njit(*args, **kwargs):  # noqa: ARG001 - mirrors the numba signature
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap

    class _SerialPrange:
        def __new__(cls, *args):
            return range(*args)

    prange = _SerialPrange
else:
    from numba import prange  # noqa: F401
