# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled pooling kernels: min/avg/max and weighted-average reductions over
variable-length index segments of a word-vector matrix.

Inputs are validated (dtype, contiguity, index bounds) by the wrappers in
embeval.kernels before reaching these functions.  Each pooling op runs in a
dedicated branch-free loop; requesting all three uses a fused pass.
"""

import numpy as np

from libc.math cimport fmax, fmin

cimport numpy as cnp

cnp.import_array()


cdef void _fill_empty_mask(
    cnp.int64_t[::1] offsets, cnp.uint8_t[::1] empty
) noexcept nogil:
    cdef Py_ssize_t t
    for t in range(offsets.shape[0] - 1):
        if offsets[t] == offsets[t + 1]:
            empty[t] = 1


cdef void _avg_loop(
    double[:, ::1] matrix,
    cnp.int64_t[::1] indices,
    cnp.int64_t[::1] offsets,
    double[:, ::1] out,
) noexcept nogil:
    cdef Py_ssize_t t, i, j, lo, hi, row
    cdef Py_ssize_t d = matrix.shape[1]
    cdef double count
    for t in range(offsets.shape[0] - 1):
        lo = offsets[t]
        hi = offsets[t + 1]
        if lo == hi:
            continue
        for i in range(lo, hi):
            row = indices[i]
            for j in range(d):
                out[t, j] += matrix[row, j]
        count = hi - lo
        for j in range(d):
            out[t, j] /= count


cdef void _min_loop(
    double[:, ::1] matrix,
    cnp.int64_t[::1] indices,
    cnp.int64_t[::1] offsets,
    double[:, ::1] out,
) noexcept nogil:
    cdef Py_ssize_t t, i, j, lo, hi, row
    cdef Py_ssize_t d = matrix.shape[1]
    for t in range(offsets.shape[0] - 1):
        lo = offsets[t]
        hi = offsets[t + 1]
        if lo == hi:
            continue
        row = indices[lo]
        for j in range(d):
            out[t, j] = matrix[row, j]
        for i in range(lo + 1, hi):
            row = indices[i]
            for j in range(d):
                out[t, j] = fmin(out[t, j], matrix[row, j])


cdef void _max_loop(
    double[:, ::1] matrix,
    cnp.int64_t[::1] indices,
    cnp.int64_t[::1] offsets,
    double[:, ::1] out,
) noexcept nogil:
    cdef Py_ssize_t t, i, j, lo, hi, row
    cdef Py_ssize_t d = matrix.shape[1]
    for t in range(offsets.shape[0] - 1):
        lo = offsets[t]
        hi = offsets[t + 1]
        if lo == hi:
            continue
        row = indices[lo]
        for j in range(d):
            out[t, j] = matrix[row, j]
        for i in range(lo + 1, hi):
            row = indices[i]
            for j in range(d):
                out[t, j] = fmax(out[t, j], matrix[row, j])


cdef void _fused_loop(
    double[:, ::1] matrix,
    cnp.int64_t[::1] indices,
    cnp.int64_t[::1] offsets,
    double[:, ::1] min_out,
    double[:, ::1] avg_out,
    double[:, ::1] max_out,
) noexcept nogil:
    # gathering a row from the (large) matrix dominates, so touch each row
    # exactly once and update all three outputs while it is cache-hot
    cdef Py_ssize_t t, i, j, lo, hi, row
    cdef Py_ssize_t d = matrix.shape[1]
    cdef double v, count
    for t in range(offsets.shape[0] - 1):
        lo = offsets[t]
        hi = offsets[t + 1]
        if lo == hi:
            continue
        row = indices[lo]
        for j in range(d):
            v = matrix[row, j]
            min_out[t, j] = v
            avg_out[t, j] = v
            max_out[t, j] = v
        for i in range(lo + 1, hi):
            row = indices[i]
            for j in range(d):
                v = matrix[row, j]
                min_out[t, j] = fmin(min_out[t, j], v)
                max_out[t, j] = fmax(max_out[t, j], v)
                avg_out[t, j] += v
        count = hi - lo
        for j in range(d):
            avg_out[t, j] /= count


def pool_segments(
    double[:, ::1] matrix,
    cnp.int64_t[::1] indices,
    cnp.int64_t[::1] offsets,
    bint do_min,
    bint do_avg,
    bint do_max,
):
    cdef Py_ssize_t n = offsets.shape[0] - 1
    cdef Py_ssize_t d = matrix.shape[1]
    cdef cnp.ndarray min_arr = np.zeros((n, d)) if do_min else None
    cdef cnp.ndarray avg_arr = np.zeros((n, d)) if do_avg else None
    cdef cnp.ndarray max_arr = np.zeros((n, d)) if do_max else None
    cdef cnp.ndarray empty_arr = np.zeros(n, dtype=np.uint8)
    cdef cnp.uint8_t[::1] empty = empty_arr

    # memoryviews must be acquired while holding the GIL
    cdef double[:, ::1] min_view = min_arr if do_min else None
    cdef double[:, ::1] avg_view = avg_arr if do_avg else None
    cdef double[:, ::1] max_view = max_arr if do_max else None

    with nogil:
        _fill_empty_mask(offsets, empty)
        if do_min and do_avg and do_max:
            _fused_loop(matrix, indices, offsets, min_view, avg_view, max_view)
        else:
            if do_min:
                _min_loop(matrix, indices, offsets, min_view)
            if do_avg:
                _avg_loop(matrix, indices, offsets, avg_view)
            if do_max:
                _max_loop(matrix, indices, offsets, max_view)
    return (
        min_arr if do_min else None,
        avg_arr if do_avg else None,
        max_arr if do_max else None,
        empty_arr.view(np.bool_),
    )


def weighted_average_segments(
    double[:, ::1] matrix,
    cnp.int64_t[::1] indices,
    double[::1] weights,
    cnp.int64_t[::1] offsets,
):
    cdef Py_ssize_t n = offsets.shape[0] - 1
    cdef Py_ssize_t d = matrix.shape[1]
    cdef cnp.ndarray out_arr = np.zeros((n, d))
    cdef cnp.ndarray empty_arr = np.zeros(n, dtype=np.uint8)
    cdef double[:, ::1] out = out_arr
    cdef cnp.uint8_t[::1] empty = empty_arr

    cdef Py_ssize_t t, i, j, lo, hi, row
    cdef double total, w
    with nogil:
        for t in range(n):
            lo = offsets[t]
            hi = offsets[t + 1]
            total = 0.0
            for i in range(lo, hi):
                total += weights[i]
            if lo == hi or total == 0.0:
                empty[t] = 1
                continue
            for i in range(lo, hi):
                row = indices[i]
                w = weights[i]
                for j in range(d):
                    out[t, j] += w * matrix[row, j]
            for j in range(d):
                out[t, j] /= total
    return out_arr, empty_arr.view(np.bool_)
