"""Segment-pooling kernels with a compiled core and a pure-Python fallback.

The compiled extension (embeval.kernels._pool, built from _pool.pyx) is
selected at import time when available; otherwise the numpy fallback in
pool_py is used.  Set EMBEVAL_PURE_PYTHON=1 to force the fallback.  The
active choice is exposed as BACKEND ("compiled" or "python").

A segment is one sentence's worth of rows into a word-vector matrix:
sentence t owns indices[offsets[t]:offsets[t+1]].  Empty segments produce
zero rows and are reported in the returned mask.
"""

from __future__ import annotations

import os

import numpy as np

from . import pool_py as _py_impl

if os.environ.get("EMBEVAL_PURE_PYTHON", "") not in ("", "0"):
    _impl = _py_impl
    BACKEND = "python"
else:
    try:
        from . import _pool as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        _impl = _py_impl
        BACKEND = "python"


def _prepare(matrix, indices, offsets):
    matrix = np.ascontiguousarray(matrix, dtype=np.float64)
    indices = np.ascontiguousarray(indices, dtype=np.int64)
    offsets = np.ascontiguousarray(offsets, dtype=np.int64)
    if matrix.ndim != 2:
        raise ValueError("matrix must be 2-D")
    if offsets.ndim != 1 or offsets.shape[0] < 1 or offsets[0] != 0:
        raise ValueError("offsets must be 1-D and start at 0")
    if np.any(np.diff(offsets) < 0) or offsets[-1] != indices.shape[0]:
        raise ValueError("offsets must be non-decreasing and end at len(indices)")
    if indices.size and (indices.min() < 0 or indices.max() >= matrix.shape[0]):
        raise IndexError("token index outside the vector matrix")
    return matrix, indices, offsets


def pool_segments(matrix, indices, offsets, do_min=False, do_avg=True, do_max=False):
    """Elementwise min/avg/max over each segment; (min, avg, max, empty_mask)."""
    if not (do_min or do_avg or do_max):
        raise ValueError("at least one pooling op required")
    matrix, indices, offsets = _prepare(matrix, indices, offsets)
    return _impl.pool_segments(matrix, indices, offsets, do_min, do_avg, do_max)


def weighted_average_segments(matrix, indices, weights, offsets):
    """Per-segment weighted average sum(w_i v_i)/sum(w_i); (out, empty_mask)."""
    matrix, indices, offsets = _prepare(matrix, indices, offsets)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    if weights.shape != indices.shape:
        raise ValueError("weights must align with indices")
    return _impl.weighted_average_segments(matrix, indices, weights, offsets)
