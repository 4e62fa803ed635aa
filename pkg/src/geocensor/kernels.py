"""Kernel backend selection.

Prefers the compiled extension; falls back to the numpy implementation
when the extension is missing or when GEOCENSOR_PURE=1 is set.
"""

from __future__ import annotations

import os

from . import _kernels_py
from ._kernels_py import DELETED, FREE, KEPT

if os.environ.get("GEOCENSOR_PURE") == "1":
    _impl = None
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = None

if _impl is not None:
    BACKEND = "cython"
    min_free_deletions = _impl.min_free_deletions
    probe_union = _impl.probe_union
else:
    BACKEND = "python"
    min_free_deletions = _kernels_py.min_free_deletions
    probe_union = _kernels_py.probe_union

__all__ = ["BACKEND", "DELETED", "FREE", "KEPT", "min_free_deletions",
           "probe_union"]
