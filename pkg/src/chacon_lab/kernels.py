"""Backend selection for the orbit kernel.

The compiled ``_ckernel`` is used when it imported successfully and the
scaled support fits in int64; otherwise the pure-Python ``_pykernel``
handles the request with unbounded integers.  Setting
``CHACON_PURE_PYTHON=1`` forces the fallback everywhere.
"""
from __future__ import annotations

import os

from . import _pykernel

try:
    from . import _ckernel
except ImportError:  # extension not built
    _ckernel = None

_INT64_BUDGET = 2**62

FORCE_PYTHON = os.environ.get("CHACON_PURE_PYTHON", "") not in ("", "0")
BACKEND = "cython" if (_ckernel is not None and not FORCE_PYTHON) else "python"


def compiled_available() -> bool:
    return _ckernel is not None


def make_grid(heights, scale, backend=None):
    """Build a Grid for ``heights`` at scale ``3**scale``.

    ``backend`` may be ``"python"``, ``"cython"`` or ``None`` (automatic).
    """
    backend = backend or BACKEND
    if backend == "cython":
        if _ckernel is None:
            raise RuntimeError("compiled kernel is not available")
        depth = len(heights) - 1
        if heights[depth] * 3 ** (scale - depth) < _INT64_BUDGET:
            return _ckernel.Grid(list(heights), scale)
    return _pykernel.Grid(heights, scale)
