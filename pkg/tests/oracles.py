"""Slow reference implementations written independently of the package code.

They use dense matrices and explicit loops and share no helpers with the
library beyond the filter taps and grid definitions they are checking.
"""

from __future__ import annotations

import numpy as np


def frft_sum(c, alpha):
    """``sum_j c(j) exp(-2 pi i j k alpha)`` over centered ``j, k`` by a double loop."""
    m = len(c)
    idx = range(-(m // 2), m // 2 + 1)
    return np.array([sum(c[j + m // 2] * np.exp(-2j * np.pi * j * k * alpha) for j in idx)
                     for k in idx])


def pp_points(n, r):
    """Frequencies of every stored index, built from the sector definitions."""
    rn = r * n
    pts = np.zeros((2, rn + 1, n + 1, 2))
    for p, k in enumerate(range(-rn // 2, rn // 2 + 1)):
        for q, l in enumerate(range(-n // 2, n // 2 + 1)):
            rad = 2.0 * k / r
            tilt = -rad * 2.0 * l / n
            pts[0, p, q] = (tilt, rad)
            pts[1, p, q] = (rad, tilt)
    return pts


def ppft_sum(img, r):
    """Pseudo-polar samples ``sum I(u, v) exp(-2 pi i (u w1 + v w2) / m0)`` in floats."""
    n = img.shape[0]
    m0 = 2.0 * (r * n + 1) / r
    u = np.arange(n) - n // 2
    pts = pp_points(n, r)
    w1 = pts[..., 0][..., None, None]
    w2 = pts[..., 1][..., None, None]
    kern = np.exp(-2j * np.pi * (u[:, None] * w1 + u[None, :] * w2) / m0)
    return np.sum(kern * img, axis=(-2, -1))


def dense(op, shape_in, dtype=float):
    """Matrix of a linear map by probing with unit vectors."""
    size = int(np.prod(shape_in))
    cols = []
    for i in range(size):
        e = np.zeros(size, dtype=dtype)
        e[i] = 1
        cols.append(np.ravel(op(e.reshape(shape_in))))
    return np.array(cols).T


def circulant_from_taps(taps, offset, length, up=1):
    """``M[a, b] = f((a - up * b) mod length)`` for taps of ``f`` starting at ``offset``."""
    f = np.zeros(length)
    for i, t in enumerate(taps):
        f[(offset + i) % length] += t
    cols = length // up
    out = np.zeros((length, cols))
    for b in range(cols):
        for a in range(length):
            out[a, b] = f[(a - up * b) % length]
    return out


def dsst_band_sum(img, h_jr, g_w, h_w, s, k, p1, p2):
    """One cone-1 band by dense matrices: refine, shear, coarsen, then the wavelet stage.

    ``h_jr``, ``g_w`` and ``h_w`` are ``(taps, offset)`` pairs; ``s = 2^jr``.
    """
    n = img.shape[0]
    refine = circulant_from_taps(*h_jr, s * n, up=s)      # (sN, N)
    y = refine @ img                                       # (sN, N)
    z = np.empty_like(y)
    for b in range(n):
        for a in range(s * n):
            z[a, b] = y[(a + k * (b - n // 2)) % (s * n), b]
    coarse = refine.T @ z                                  # (N, N)
    g = circulant_from_taps(*g_w, n)                       # g[a, b] = g(a - b)
    h = circulant_from_taps(*h_w, n)
    # correlation: out[a, b] = sum g(p - p1[a]) h(q - p2[b]) coarse[p, q]
    return (g.T[p1] @ coarse @ h.T[p2].T)


def aniso_sum(c, g_taps, g_off, h_taps, h_off, j1, j2):
    """``sum_m g(m1 - 2^j1 n1) h(m2 - 2^j2 n2) c(m)`` by explicit loops."""
    n = c.shape[0]
    out = np.zeros((n >> j1, n >> j2))
    for a in range(out.shape[0]):
        for b in range(out.shape[1]):
            acc = 0.0
            for i, gt in enumerate(g_taps):
                m1 = (g_off + i + (a << j1)) % n
                for q, ht in enumerate(h_taps):
                    m2 = (h_off + q + (b << j2)) % n
                    acc += gt * ht * c[m1, m2]
            out[a, b] = acc
    return out
