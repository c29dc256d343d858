"""Pure-Python (numpy per segment) fallback for the pooling kernels.

Same contracts as the compiled module in _pool.pyx; used automatically when
the extension is unavailable or when EMBEVAL_PURE_PYTHON is set.
"""

from __future__ import annotations

import numpy as np


def pool_segments(matrix, indices, offsets, do_min, do_avg, do_max):
    n = offsets.shape[0] - 1
    d = matrix.shape[1]
    min_out = np.zeros((n, d)) if do_min else None
    avg_out = np.zeros((n, d)) if do_avg else None
    max_out = np.zeros((n, d)) if do_max else None
    empty = np.zeros(n, dtype=bool)
    for t in range(n):
        lo, hi = offsets[t], offsets[t + 1]
        if lo == hi:
            empty[t] = True
            continue
        block = matrix[indices[lo:hi]]
        if do_min:
            min_out[t] = block.min(axis=0)
        if do_avg:
            avg_out[t] = block.sum(axis=0) / (hi - lo)
        if do_max:
            max_out[t] = block.max(axis=0)
    return min_out, avg_out, max_out, empty


def weighted_average_segments(matrix, indices, weights, offsets):
    n = offsets.shape[0] - 1
    d = matrix.shape[1]
    out = np.zeros((n, d))
    empty = np.zeros(n, dtype=bool)
    for t in range(n):
        lo, hi = offsets[t], offsets[t + 1]
        total = weights[lo:hi].sum()
        if lo == hi or total == 0.0:
            empty[t] = True
            continue
        out[t] = (weights[lo:hi, None] * matrix[indices[lo:hi]]).sum(axis=0) / total
    return out, empty
