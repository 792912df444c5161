"""Select the compiled core when it is importable, else the numpy fallback.

Set ``GLP_PURE_PYTHON=1`` to force the fallback.
"""
import os

import numpy as np

from . import _core_py

if os.environ.get("GLP_PURE_PYTHON", "") not in ("", "0"):
    _compiled = None
else:
    try:
        from . import _core as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"


def _as3d(values):
    v = np.ascontiguousarray(values, dtype=np.float64)
    d = v.ndim
    if d > 3:
        raise ValueError(f"at most 3 dimensions supported, got {d}")
    return v.reshape(v.shape + (1,) * (3 - d)), d


def _offsets3d(offsets):
    off = np.asarray(offsets, dtype=np.int64).reshape(len(offsets), -1)
    pad = np.zeros((off.shape[0], 3), dtype=np.int64)
    pad[:, : off.shape[1]] = off
    return np.ascontiguousarray(pad)


def stencil_sum(values, offsets, weights, backend=None):
    """Periodic ``sum_s w_s values[x - o_s]`` for 1-3 dimensional arrays."""
    v3, d = _as3d(values)
    off = _offsets3d(offsets)
    w = np.ascontiguousarray(weights, dtype=np.float64)
    use = backend or BACKEND
    if use == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled core is not available")
        out = _compiled.stencil_sum(v3, off, w)
    else:
        out = _core_py.stencil_sum(v3, off, w)
    return np.asarray(out).reshape(np.shape(values))
