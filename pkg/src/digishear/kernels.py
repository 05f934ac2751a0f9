"""Hot inner loops with a compiled implementation and a numpy fallback.

The compiled extension ``_ckernels`` is used when it was built; otherwise the
numpy versions below are used.  Setting ``DIGISHEAR_BACKEND=numpy`` forces
the fallback.  ``BACKEND`` names the active choice and ``numpy_kernels``
always exposes the fallback for comparisons.
"""

from __future__ import annotations

import os

import numpy as np


def _shear_rows_np(x: np.ndarray, k: int, center: int) -> np.ndarray:
    """``out[n1, b] = x[(n1 + k (b - center)) mod L, b]`` for a 2D array."""
    rows, cols = x.shape
    shift = k * (np.arange(cols) - center)
    idx = (np.arange(rows)[:, None] + shift[None, :]) % rows
    return np.take_along_axis(x, idx, axis=0)


def _holder_exponents_np(img: np.ndarray, radius: int) -> np.ndarray:
    """Local Hoelder exponent per pixel by a log-log least-squares fit.

    For each pixel, ``d(r)`` is the largest absolute difference to a pixel at
    Chebyshev distance ``r`` (``r = 1..radius``, periodic); the exponent is the
    slope of ``log d(r)`` against ``log r``.  Pixels whose differences vanish
    get ``nan``.
    """
    img = np.asarray(img, dtype=float)
    d = np.zeros((radius,) + img.shape)
    for r in range(1, radius + 1):
        best = np.zeros(img.shape)
        for a in range(-r, r + 1):
            for b in range(-r, r + 1):
                if max(abs(a), abs(b)) != r:
                    continue
                diff = np.abs(np.roll(img, (a, b), axis=(0, 1)) - img)
                np.maximum(best, diff, out=best)
        d[r - 1] = best
    lr = np.log(np.arange(1, radius + 1, dtype=float))
    lr -= lr.mean()
    with np.errstate(divide="ignore"):
        ld = np.log(d)
    valid = np.all(np.isfinite(ld), axis=0)
    ld = np.where(valid, ld, 0.0)
    slope = np.tensordot(lr, ld - ld.mean(axis=0), axes=(0, 0)) / np.dot(lr, lr)
    return np.where(valid, slope, np.nan)


class _NumpyKernels:
    shear_rows = staticmethod(_shear_rows_np)
    holder_exponents = staticmethod(_holder_exponents_np)


numpy_kernels = _NumpyKernels()

try:
    if os.environ.get("DIGISHEAR_BACKEND", "").lower() == "numpy":
        raise ImportError("numpy backend requested")
    from . import _ckernels as _compiled

    class _CompiledKernels:
        @staticmethod
        def shear_rows(x, k, center):
            x = np.ascontiguousarray(x, dtype=float)
            return np.asarray(_compiled.shear_rows(x, int(k), int(center)))

        @staticmethod
        def holder_exponents(img, radius):
            img = np.ascontiguousarray(img, dtype=float)
            return np.asarray(_compiled.holder_exponents(img, int(radius)))

    active = _CompiledKernels()
    BACKEND = "cython"
except ImportError:
    active = numpy_kernels
    BACKEND = "numpy"


def shear_rows(x: np.ndarray, k: int, center: int) -> np.ndarray:
    if np.iscomplexobj(x):
        return _shear_rows_np(x, k, center)
    return active.shear_rows(x, k, center)


def holder_exponents(img: np.ndarray, radius: int = 4) -> np.ndarray:
    if radius < 2:
        raise ValueError("a slope needs at least two radii")
    return active.holder_exponents(img, radius)
