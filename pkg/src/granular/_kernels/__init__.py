"""Hot numeric kernels with a selectable backend.

The backend is chosen once at import from ``GRANULAR_BACKEND``:

* ``numba`` (default when numba imports cleanly) -- JIT-compiled loops
* ``numpy`` -- vectorised reference implementation, no compiler needed

Both modules expose the same functions. Tests and the benchmark import them
directly to compare the two paths.
"""

import os

from . import numpy_impl

_requested = os.environ.get("GRANULAR_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"GRANULAR_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

if _requested == "numba":
    try:
        from . import numba_impl as _impl
        BACKEND = "numba"
    except ImportError:  # numba missing or incompatible with this numpy
        _impl = numpy_impl
        BACKEND = "numpy"
else:
    _impl = numpy_impl
    BACKEND = "numpy"

som_train = _impl.som_train
nearest = _impl.nearest
potentials = _impl.potentials
discern_masks = _impl.discern_masks
hitting_table = _impl.hitting_table

__all__ = [
    "BACKEND",
    "som_train",
    "nearest",
    "potentials",
    "discern_masks",
    "hitting_table",
]
