"""Kernel backend selection.

RESUNIV_BACKEND=auto|numba|numpy picks the implementation of the hot
kernels at first use.  `auto` (the default) takes numba when it imports,
pure numpy otherwise; `numba` fails loudly if numba is unavailable.
Run `python benchmarks/bench_backends.py` to compare the two.
"""

import os

_ENV_VAR = "RESUNIV_BACKEND"
_kernels = None
_name = None


def _resolve():
    global _kernels, _name
    mode = os.environ.get(_ENV_VAR, "auto").lower()
    if mode not in ("auto", "numba", "numpy"):
        raise ValueError(f"{_ENV_VAR} must be auto, numba or numpy; got {mode!r}")
    if mode == "numpy":
        from . import kernels_numpy as k
        _kernels, _name = k, "numpy"
        return
    try:
        from . import kernels_numba as k
        _kernels, _name = k, "numba"
    except ImportError:
        if mode == "numba":
            raise
        from . import kernels_numpy as k
        _kernels, _name = k, "numpy"


def get_kernels():
    """The active kernel module (resolved once per process)."""
    if _kernels is None:
        _resolve()
    return _kernels


def backend_name() -> str:
    if _name is None:
        _resolve()
    return _name
