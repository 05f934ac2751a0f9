# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the loops in :mod:`digishear.kernels`."""

import numpy as np

from libc.math cimport fabs, log, NAN


def shear_rows(const double[:, ::1] x, long k, long center):
    """``out[n1, b] = x[(n1 + k (b - center)) mod L, b]``."""
    cdef Py_ssize_t rows = x.shape[0], cols = x.shape[1]
    cdef Py_ssize_t a, b, src
    cdef long shift
    out = np.empty((rows, cols))
    cdef double[:, ::1] o = out
    for b in range(cols):
        shift = (k * (b - center)) % rows
        if shift < 0:
            shift += rows
        for a in range(rows):
            src = a + shift
            if src >= rows:
                src -= rows
            o[a, b] = x[src, b]
    return out


cdef inline double _ring_max(const double[:, ::1] img, Py_ssize_t a, Py_ssize_t b,
                             Py_ssize_t r, const Py_ssize_t[::1] wrap0,
                             const Py_ssize_t[::1] wrap1, Py_ssize_t pad) nogil:
    """Largest ``|img[p, q] - img[a, b]|`` over the ring at Chebyshev distance ``r``."""
    cdef double centre = img[a, b], best = 0.0, diff
    cdef Py_ssize_t d, p, q, lo, hi
    # top and bottom rows of the ring
    for d in range(-r, r + 1):
        q = wrap1[b + d + pad]
        lo = wrap0[a - r + pad]
        hi = wrap0[a + r + pad]
        diff = fabs(img[lo, q] - centre)
        if diff > best:
            best = diff
        diff = fabs(img[hi, q] - centre)
        if diff > best:
            best = diff
    # left and right columns without the corners
    for d in range(-r + 1, r):
        p = wrap0[a + d + pad]
        lo = wrap1[b - r + pad]
        hi = wrap1[b + r + pad]
        diff = fabs(img[p, lo] - centre)
        if diff > best:
            best = diff
        diff = fabs(img[p, hi] - centre)
        if diff > best:
            best = diff
    return best


def holder_exponents(const double[:, ::1] img, int radius):
    """Log-log slope of the largest ring difference against the ring radius."""
    cdef Py_ssize_t n0 = img.shape[0], n1 = img.shape[1]
    cdef Py_ssize_t a, b, r, pad = radius
    cdef double best, den = 0.0, num
    cdef bint valid
    out = np.empty((n0, n1))
    cdef double[:, ::1] o = out
    lr_arr = np.log(np.arange(1, radius + 1, dtype=float))
    lr_arr -= lr_arr.mean()
    cdef double[::1] lr = lr_arr
    cdef Py_ssize_t[::1] wrap0 = np.arange(-pad, n0 + pad, dtype=np.intp) % n0
    cdef Py_ssize_t[::1] wrap1 = np.arange(-pad, n1 + pad, dtype=np.intp) % n1
    for r in range(radius):
        den += lr[r] * lr[r]
    with nogil:
        for a in range(n0):
            for b in range(n1):
                num = 0.0
                valid = True
                for r in range(1, radius + 1):
                    best = _ring_max(img, a, b, r, wrap0, wrap1, pad)
                    if best <= 0.0:
                        valid = False
                        break
                    num += lr[r - 1] * log(best)
                o[a, b] = num / den if valid else NAN
    return out
