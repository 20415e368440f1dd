"""Hot numerical kernels with a compiled backend and a numpy fallback.

The Cython extension is used when it was built; otherwise (or when
``FDMETHOD_PURE_PYTHON=1`` is set) the numpy module is used.  Callers must go
through this module's attributes (``kernels.series_mul(...)``) so that
:func:`set_backend` takes effect everywhere.
"""

import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_NAMES = (
    "series_mul",
    "series_div",
    "series_exp",
    "series_log",
    "series_sincos",
    "series_sqrt",
    "series_compose",
    "cumulative_simpson",
)

BACKEND = None


def available_backends():
    return ["cython", "python"] if _ckernels is not None else ["python"]


def set_backend(name):
    """Select ``"cython"`` or ``"python"`` for all subsequent kernel calls."""
    global BACKEND
    if name == "cython":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not available; rebuild the package")
        mod = _ckernels
    elif name == "python":
        mod = _pykernels
    else:
        raise ValueError(f"unknown backend {name!r}")
    g = globals()
    for fn in _NAMES:
        g[fn] = getattr(mod, fn)
    BACKEND = name


if _ckernels is not None and os.environ.get("FDMETHOD_PURE_PYTHON", "") in ("", "0"):
    set_backend("cython")
else:
    set_backend("python")
