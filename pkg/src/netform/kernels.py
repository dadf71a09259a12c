"""Kernel backend dispatch.

Set NETFORM_KERNELS=numpy to force the scipy/numpy lane, NETFORM_KERNELS=numba
to require the jit lane (import error if numba is missing).  Default: numba
when importable, numpy otherwise.
"""

import os

from . import _kernels_numpy

try:
    from . import _kernels_numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    _kernels_numba = None
    HAS_NUMBA = False

_requested = os.environ.get("NETFORM_KERNELS", "auto").strip().lower()

if _requested in ("", "auto"):
    _impl = _kernels_numba if HAS_NUMBA else _kernels_numpy
elif _requested == "numba":
    if not HAS_NUMBA:
        raise ImportError("NETFORM_KERNELS=numba but numba is not importable")
    _impl = _kernels_numba
elif _requested == "numpy":
    _impl = _kernels_numpy
else:
    raise ValueError(f"NETFORM_KERNELS must be auto, numba or numpy, got {_requested!r}")

BACKEND = "numba" if _impl is _kernels_numba else "numpy"

label_components = _impl.label_components
knapsack_fill = _impl.knapsack_fill
