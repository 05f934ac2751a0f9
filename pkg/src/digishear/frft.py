"""Fractional Fourier transform on centered index sets, plus padding.

The transform of a length ``N+1`` vector ``c`` indexed by ``j = -N/2..N/2`` is

    (F^a c)(k) = sum_j c(j) exp(-2 pi i j k a),   k = -N/2..N/2.

The fast path uses the chirp identity ``jk = (j^2 + k^2 - (j-k)^2) / 2`` and a
zero-padded cyclic convolution of power-of-two length.  Rows of a 2D input may
carry their own ``a``, which is how the pseudo-polar transform uses it.
"""

from __future__ import annotations

import numpy as np
import scipy.fft as sfft


def _centered(length: int) -> np.ndarray:
    return np.arange(length) - length // 2


def _expi_turns(t: np.ndarray) -> np.ndarray:
    """exp(2 pi i t) after reducing t modulo one."""
    t = t - np.round(t)
    return np.exp(2j * np.pi * t)


class FrftPlan:
    """Chirp tables for one or many frFT parameters of a fixed odd length.

    ``alpha`` may be a scalar or a 1D array; an array applies row ``i`` of a
    2D input with ``alpha[i]``.
    """

    def __init__(self, length: int, alpha):
        if length % 2 == 0 or length < 1:
            raise ValueError(f"frFT length must be odd, got {length}")
        self.length = length
        self.alpha = np.asarray(alpha, dtype=float)
        a = self.alpha[..., None]
        j = _centered(length).astype(float)
        self.nfft = 1 << int(np.ceil(np.log2(2 * length - 1)))
        # pre/post chirp exp(-i pi a j^2)
        self.chirp = _expi_turns(-0.5 * a * j**2)
        d = np.zeros(self.nfft)
        span = np.arange(length, dtype=float)
        d[:length] = span
        d[self.nfft - length + 1:] = span[:0:-1]
        kern = _expi_turns(0.5 * a * d**2)
        self.kernel_hat = sfft.fft(kern, axis=-1)

    def apply(self, c: np.ndarray) -> np.ndarray:
        c = np.asarray(c)
        if c.shape[-1] != self.length:
            raise ValueError(f"expected last axis {self.length}, got {c.shape[-1]}")
        x = sfft.fft(c * self.chirp, n=self.nfft, axis=-1)
        y = sfft.ifft(x * self.kernel_hat, axis=-1)[..., : self.length]
        return y * self.chirp


def frft(c, alpha, plan: FrftPlan | None = None) -> np.ndarray:
    """Fast fractional Fourier transform of ``c`` (last axis, odd length)."""
    c = np.asarray(c, dtype=complex)
    if plan is None:
        plan = FrftPlan(c.shape[-1], alpha)
    return plan.apply(c)


def frft_adjoint(c, alpha, plan: FrftPlan | None = None) -> np.ndarray:
    """Adjoint of :func:`frft`, which is the transform with ``-alpha``."""
    c = np.asarray(c, dtype=complex)
    if plan is None:
        plan = FrftPlan(c.shape[-1], -np.asarray(alpha, dtype=float))
    return plan.apply(c)


def frft_direct(c, alpha) -> np.ndarray:
    """O(N^2) reference evaluation of :func:`frft` for a single vector."""
    c = np.asarray(c, dtype=complex)
    if c.ndim != 1 or c.size % 2 == 0:
        raise ValueError("direct frFT needs a 1D vector of odd length")
    j = _centered(c.size)
    turns = np.outer(j, j) * float(alpha)
    return _expi_turns(-turns) @ c


def pad(c, m: int, axis: int = -1) -> np.ndarray:
    """Symmetric zero padding of an even-length axis ``N`` to odd length ``m``.

    Entry ``k`` of the input (``k = -N/2..N/2-1``) lands on index ``k`` of the
    output window ``-(m-1)/2..(m-1)/2``.
    """
    c = np.moveaxis(np.asarray(c), axis, -1)
    n = c.shape[-1]
    if n % 2 or m % 2 == 0:
        raise ValueError("pad maps an even length onto an odd length")
    if m <= n:
        raise ValueError(f"padded length {m} must exceed {n}")
    out = np.zeros(c.shape[:-1] + (m,), dtype=c.dtype)
    start = (m - 1) // 2 - n // 2
    out[..., start:start + n] = c
    return np.moveaxis(out, -1, axis)


def pad_adjoint(c, n: int, axis: int = -1) -> np.ndarray:
    """Restriction to the central window, the adjoint of :func:`pad`."""
    c = np.moveaxis(np.asarray(c), axis, -1)
    m = c.shape[-1]
    if n % 2 or m % 2 == 0 or m <= n:
        raise ValueError(f"cannot restrict length {m} to {n}")
    start = (m - 1) // 2 - n // 2
    return np.moveaxis(c[..., start:start + n], -1, axis)


def centered_dft(x, m: int, axis: int = -1) -> np.ndarray:
    """Unaliased DFT of an even-length axis evaluated on ``m`` (odd) centered frequencies.

    ``out(q) = sum_v x(v) exp(-2 pi i v q / m)`` with ``v = -N/2..N/2-1`` and
    ``q = -(m-1)/2..(m-1)/2``; equivalent to padding to ``m`` and a length-``m`` FFT.
    """
    x = np.moveaxis(np.asarray(x), axis, -1)
    n = x.shape[-1]
    if m % 2 == 0 or m <= n:
        raise ValueError(f"need odd m > {n}, got {m}")
    buf = np.zeros(x.shape[:-1] + (m,), dtype=complex)
    buf[..., : n // 2] = x[..., n // 2:]
    buf[..., m - n // 2:] = x[..., : n // 2]
    out = sfft.fftshift(sfft.fft(buf, axis=-1), axes=-1)
    return np.moveaxis(out, -1, axis)


def centered_dft_adjoint(y, n: int, axis: int = -1) -> np.ndarray:
    """Adjoint of :func:`centered_dft`."""
    y = np.moveaxis(np.asarray(y), axis, -1)
    m = y.shape[-1]
    buf = sfft.ifft(sfft.ifftshift(y, axes=-1), axis=-1) * m
    out = np.concatenate([buf[..., m - n // 2:], buf[..., : n // 2]], axis=-1)
    return np.moveaxis(out, -1, axis)
