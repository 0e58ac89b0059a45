"""Hot kernels with a compiled backend and a numpy fallback.

The compiled extension ``_kernels`` is used when importable; setting the
environment variable ``AIMKP_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _fallback

BACKEND = "python"

if os.environ.get("AIMKP_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback
else:
    _impl = _fallback

lu_det = _impl.lu_det
det_batch = _impl.det_batch
subset_sum = _impl.subset_sum


def backends():
    """Return ``{name: module}`` for every backend available in this process."""
    out = {"python": _fallback}
    try:
        from . import _kernels

        out["cython"] = _kernels
    except ImportError:
        pass
    return out

__all__ = ["BACKEND", "lu_det", "det_batch", "subset_sum", "backends"]
