"""Kernel backend selection.

Hot loops are compiled with numba when available.  The environment variable
``DEBONDWAVE_BACKEND`` selects the path:

    auto   use numba if importable (default)
    numba  require numba, fail loudly if missing
    numpy  pure-numpy fallback, no JIT

``njit`` below is either the real numba decorator (cache=True, no fastmath so
both paths stay bit-comparable) or an identity decorator.  Kernels are written
so the same source runs under both.
"""

import os

_choice = os.environ.get("DEBONDWAVE_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "numba", "numpy"):
    raise ValueError(f"DEBONDWAVE_BACKEND must be auto|numba|numpy, got {_choice!r}")

NUMBA_ENABLED = False

if _choice in ("auto", "numba"):
    try:
        import numba

        NUMBA_ENABLED = True
    except ImportError:
        if _choice == "numba":
            raise
        numba = None
else:
    numba = None


def njit(func=None, **kwargs):
    """numba.njit with package defaults, or a no-op under the numpy backend."""
    if NUMBA_ENABLED:
        kwargs.setdefault("cache", True)
        if func is None:
            return numba.njit(**kwargs)
        return numba.njit(func, **kwargs)
    if func is None:
        return lambda f: f
    return func


def backend_name():
    return "numba" if NUMBA_ENABLED else "numpy"
