"""Backend selection for the hot kernels.

The compiled extension is used when it imports; setting ``IRS_BEAMSIM_PURE=1``
forces the numpy fallback.
"""
import os

from . import _fallback

BACKEND = "python"
segments_blocked = _fallback.segments_blocked
knn_select = _fallback.knn_select

if not os.environ.get("IRS_BEAMSIM_PURE"):
    try:
        from . import _kernels
    except ImportError:
        _kernels = None
    else:
        BACKEND = "cython"
        segments_blocked = _kernels.segments_blocked
        knn_select = _kernels.knn_select
