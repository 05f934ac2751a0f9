"""Digital separable shearlet transform.

Axis 0 of an image is ``x1`` and axis 1 is ``x2``.  Scale ``j`` uses the
refinement exponent ``jr = ceil(j/2)`` for the digital shear and the sampling
exponent ``js = floor(j/2)`` along ``x2``, so that ``jr + js = j``.  The
horizontal cone uses shears ``k = -2^jr .. 2^jr - 1`` and the vertical cone
(the same pipeline on the transposed image) ``k = -2^jr + 1 .. 2^jr``; the
two diagonal shears are therefore each used once.

All filtering is circular and done with FFTs, and the adjoint is assembled
stage by stage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.fft as sfft
from scipy.special import comb
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from . import kernels
from .core import CgResult, NumericalError, check_image, conjugate_gradient

CONES = (1, 2)


# filters


@dataclass(frozen=True)
class Filter1D:
    """Real taps; ``taps[i]`` sits at index ``offset + i``."""

    taps: np.ndarray
    offset: int = 0

    @property
    def indices(self) -> np.ndarray:
        return self.offset + np.arange(len(self.taps))

    def upsample(self, factor: int) -> Filter1D:
        out = np.zeros((len(self.taps) - 1) * factor + 1)
        out[::factor] = self.taps
        return Filter1D(out, self.offset * factor)

    def convolve(self, other: Filter1D) -> Filter1D:
        return Filter1D(np.convolve(self.taps, other.taps), self.offset + other.offset)

    def reversed(self) -> Filter1D:
        return Filter1D(self.taps[::-1].copy(), -(self.offset + len(self.taps) - 1))

    def periodized(self, length: int) -> np.ndarray:
        """Taps folded onto a circular grid of ``length`` samples."""
        return np.bincount(self.indices % length, weights=self.taps, minlength=length)

    def dft(self, length: int) -> np.ndarray:
        """``sum_d f(d) exp(-2 pi i d q / length)`` for ``q = 0..length-1``."""
        return sfft.fft(self.periodized(length))

    def response(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        return np.exp(-2j * np.pi * np.multiply.outer(xi, self.indices)) @ self.taps


def maxflat_magnitude(k: int, l: int, xi) -> np.ndarray:
    """``cos(pi xi)^(2K) sum_{n<L} C(K-1+n, n) sin(pi xi)^(2n)``."""
    if k < 1 or l < 1:
        raise ValueError("K and L must be positive")
    xi = np.asarray(xi, dtype=float)
    s2 = np.sin(np.pi * xi) ** 2
    poly = sum(comb(k - 1 + n, n, exact=True) * s2**n for n in range(l))
    return np.cos(np.pi * xi) ** (2 * k) * poly


def _pick_minimum_phase(roots: np.ndarray, half: int, tol: float = 1e-6) -> np.ndarray:
    inside = roots[np.abs(roots) < 1 - tol]
    on = roots[np.abs(np.abs(roots) - 1) <= tol]
    if len(inside) + len(on) / 2 != half or len(on) % 2:
        raise NumericalError("spectral factorization: roots cannot be split cleanly")
    on = on[np.argsort(np.angle(on))][::2]
    return np.concatenate([inside, on])


def spectral_factorize(mag2: np.ndarray) -> np.ndarray:
    """Minimum-phase real taps ``h`` with ``|h^(xi)|^2 = sum_k a_k exp(-2 pi i k xi)``.

    ``mag2`` holds the symmetric coefficients ``a_{-M}..a_M``.
    """
    a = np.asarray(mag2, dtype=float)
    if a.ndim != 1 or a.size % 2 == 0:
        raise ValueError("expected 2M+1 symmetric coefficients")
    if not np.allclose(a, a[::-1], atol=1e-12 * np.abs(a).max()):
        raise ValueError("coefficients must be symmetric")
    half = a.size // 2
    grid = np.linspace(0, 1, 4096, endpoint=False)
    k = np.arange(-half, half + 1)
    values = np.cos(2 * np.pi * np.outer(grid, k)) @ a
    if values.min() < -1e-10 * max(values.max(), 1.0):
        raise NumericalError("magnitude polynomial is negative somewhere")
    if half == 0:
        return np.array([np.sqrt(a[0])])
    # z^M times the Laurent polynomial; numpy wants highest degree first
    roots = np.roots(a[::-1])
    chosen = _pick_minimum_phase(roots, half)
    h = np.real(np.poly(chosen))
    scale = np.sqrt(values.max() / np.max(np.abs(Filter1D(h).response(grid)) ** 2))
    return h * scale


def maxflat_filter(k: int = 4, l: int | None = None) -> np.ndarray:
    """Minimum-phase lowpass with ``|h^|^2 = 2 |m0|^2`` of the maxflat family.

    The ``(1 + z^-1)^K`` factor is kept analytic; only the remaining
    polynomial in ``sin^2`` is factored numerically.
    """
    l = k if l is None else l
    q = [comb(k - 1 + n, n, exact=True) for n in range(l)]
    yroots = np.roots(q[::-1]) if l > 1 else np.array([])
    zs = []
    for y in yroots:
        # y = (2 - z - 1/z) / 4  <=>  z^2 - (2 - 4y) z + 1 = 0
        pair = np.roots([1.0, -(2.0 - 4.0 * y), 1.0])
        zs.append(pair[np.argmin(np.abs(pair))])
    r = np.real(np.poly(zs)) if zs else np.array([1.0])
    r = r / r.sum()
    binom = np.array([comb(k, i, exact=True) for i in range(k + 1)], dtype=float) / 2**k
    return np.sqrt(2.0) * np.convolve(binom, r)


@dataclass(frozen=True)
class FilterPair:
    h: Filter1D
    g: Filter1D

    @classmethod
    def from_lowpass(cls, taps) -> FilterPair:
        taps = np.asarray(taps, dtype=float)
        h = Filter1D(taps, 0)
        n = 1 - (len(taps) - 1) + np.arange(len(taps))
        g = Filter1D(((-1.0) ** n) * taps[::-1], int(n[0]))
        return cls(h, g)

    @classmethod
    def maxflat(cls, k: int = 4, l: int | None = None) -> FilterPair:
        return cls.from_lowpass(maxflat_filter(k, l))


def iterated_filters(pair: FilterPair, jmax: int) -> tuple[dict[int, Filter1D], dict[int, Filter1D]]:
    """``h_j`` and ``g_j`` for ``j = 0..jmax`` (``h_0`` is the unit impulse)."""
    hs = {0: Filter1D(np.ones(1), 0)}
    gs = {}
    for j in range(1, jmax + 1):
        gs[j] = hs[j - 1].convolve(pair.g.upsample(2 ** (j - 1)))
        hs[j] = hs[j - 1].convolve(pair.h.upsample(2 ** (j - 1)))
    return hs, gs


# the shear coupling filter


def cascade_scaling(pair: FilterPair, levels: int = 8) -> tuple[np.ndarray, float]:
    """Samples of the scaling function on ``2^-levels`` spacing and that spacing."""
    c = np.ones(1)
    for _ in range(levels):
        up = np.zeros(2 * len(c) - 1)
        up[::2] = c
        c = np.sqrt(2.0) * np.convolve(up, pair.h.taps)
    step = 2.0**-levels
    return c / (c.sum() * step), step


def shear_coupling(pair: FilterPair, k: int, levels: int = 8) -> tuple[np.ndarray, tuple[int, int]]:
    """Taps of ``Phi_k(n) = <phi(S_k .), phi(. - n)>`` and the index of ``n = 0``."""
    phi, step = cascade_scaling(pair, levels)
    per = 2**levels
    support = len(phi)
    auto = np.correlate(phi, phi, mode="full") * step  # A(t), t = (i - support + 1) step
    span = (support - 1) // per + 1
    n2s = np.arange(-span, span + 1)
    n1_extent = span + abs(k) * span
    n1s = np.arange(-n1_extent, n1_extent + 1)
    out = np.zeros((n1s.size, n2s.size))
    x2 = np.arange(support)
    for b, n2 in enumerate(n2s):
        shifted = x2 - n2 * per
        ok = (shifted >= 0) & (shifted < support)
        prod = np.zeros(support)
        prod[ok] = phi[ok] * phi[shifted[ok]]
        nz = np.nonzero(prod)[0]
        if nz.size == 0:
            continue
        for a, n1 in enumerate(n1s):
            t = n1 * per + k * nz  # A at (n1 + k x2), in grid units
            idx = t + support - 1
            good = (idx >= 0) & (idx < auto.size)
            out[a, b] = step * np.sum(prod[nz[good]] * auto[idx[good]])
    return out, (n1_extent, span)


# transform


def _positions(n: int, step: Fraction) -> np.ndarray:
    count = Fraction(n) / step
    if count.denominator != 1:
        raise ValueError(f"sampling step {step} does not divide N={n}")
    i = np.arange(int(count))
    return np.array([math.floor(step * int(t) + Fraction(1, 2)) for t in i], dtype=int) % n


@dataclass
class DSSTCoeffs:
    bands: dict[tuple[int, int, int], np.ndarray]
    low: np.ndarray

    def arrays(self) -> list[np.ndarray]:
        return [self.low] + [self.bands[key] for key in sorted(self.bands)]

    def to_vector(self) -> np.ndarray:
        return np.concatenate([a.ravel() for a in self.arrays()])

    def like(self, vec: np.ndarray) -> DSSTCoeffs:
        out, pos = [], 0
        for a in self.arrays():
            out.append(np.asarray(vec[pos:pos + a.size]).reshape(a.shape))
            pos += a.size
        keys = sorted(self.bands)
        return DSSTCoeffs(dict(zip(keys, out[1:])), out[0])

    @property
    def count(self) -> int:
        return sum(a.size for a in self.arrays())


def shear_set(cone: int, j: int) -> range:
    s = 2 ** math.ceil(j / 2)
    return range(-s, s) if cone == 1 else range(-s + 1, s + 1)


class DsstPlan:
    """Precomputed filter spectra and sampling positions for one configuration."""

    def __init__(self, n: int, scales: int, c1=1, c2=1, pair: FilterPair | None = None,
                 phi_mode: str = "delta"):
        if n & (n - 1) or n < 2**scales or scales < 1:
            raise ValueError(f"need N a power of two with N >= 2^J, got N={n}, J={scales}")
        if phi_mode not in ("delta", "numeric"):
            raise ValueError(f"unknown coupling mode {phi_mode!r}")
        self.n = n
        self.scales = scales
        self.c1 = Fraction(str(c1)) if not isinstance(c1, Fraction) else c1
        self.c2 = Fraction(str(c2)) if not isinstance(c2, Fraction) else c2
        if self.c1 <= 0 or self.c2 <= 0:
            raise ValueError("sampling constants must be positive")
        self.pair = pair or FilterPair.maxflat(4)
        self.phi_mode = phi_mode
        big = scales + (scales + 1) // 2
        self.h, self.g = iterated_filters(self.pair, big)
        self.refine = {}
        for j in range(scales):
            jr = math.ceil(j / 2)
            if jr not in self.refine:
                s = 2**jr
                self.refine[jr] = self.h[jr].dft(s * n)
        self.stage = {}
        for j in range(scales):
            js = j // 2
            self.stage[j] = (
                self.g[scales - j].dft(n),
                _positions(n, 2 ** (scales - j) * self.c1),
                self.h[scales - js].dft(n),
                _positions(n, 2 ** (scales - js) * self.c2),
            )
        self.low_stage = (
            self.h[scales].dft(n),
            _positions(n, 2 ** (scales - 1) * self.c1),
            _positions(n, 2 ** (scales - 1) * self.c2),
        )
        self.coupling = {}
        if phi_mode == "numeric":
            for j in range(scales):
                jr = math.ceil(j / 2)
                for cone in CONES:
                    for k in shear_set(cone, j):
                        if (jr, k) not in self.coupling:
                            taps, origin = shear_coupling(self.pair, k)
                            self.coupling[(jr, k)] = self._coupling_dft(taps, origin, 2**jr * n)

    def _coupling_dft(self, taps, origin, rows):
        grid = np.zeros((rows, self.n))
        a = (np.arange(taps.shape[0]) - origin[0]) % rows
        b = (np.arange(taps.shape[1]) - origin[1]) % self.n
        np.add.at(grid, (a[:, None], b[None, :]), taps)
        return sfft.fft2(grid)

    @property
    def keys(self) -> list[tuple[int, int, int]]:
        return sorted((cone, j, k) for cone in CONES for j in range(self.scales)
                      for k in shear_set(cone, j))

    def count(self) -> int:
        total = len(self.low_stage[1]) * len(self.low_stage[2])
        for cone, j, _ in self.keys:
            total += len(self.stage[j][1]) * len(self.stage[j][3])
        return total


def _refined(x: np.ndarray, plan: DsstPlan, jr: int) -> np.ndarray:
    """Upsample along axis 0 by ``2^jr`` and convolve with ``h_jr``."""
    s = 2**jr
    spec = np.tile(sfft.fft(x, axis=0), (s, 1)) * plan.refine[jr][:, None]
    return sfft.ifft(spec, axis=0).real


def _refined_adjoint(y: np.ndarray, plan: DsstPlan, jr: int) -> np.ndarray:
    s = 2**jr
    z = sfft.ifft(sfft.fft(y, axis=0) * np.conj(plan.refine[jr])[:, None], axis=0).real
    return z[::s]


def _shear(y: np.ndarray, k: int, plan: DsstPlan, jr: int, adjoint: bool = False) -> np.ndarray:
    if not adjoint:
        out = kernels.shear_rows(y, k, plan.n // 2)
        if plan.phi_mode == "numeric":
            out = sfft.ifft2(sfft.fft2(out) * plan.coupling[(jr, k)]).real
        return out
    if plan.phi_mode == "numeric":
        y = sfft.ifft2(sfft.fft2(y) * np.conj(plan.coupling[(jr, k)])).real
    return kernels.shear_rows(y, -k, plan.n // 2)


def _coarsen(y: np.ndarray, plan: DsstPlan, jr: int) -> np.ndarray:
    """Correlate along axis 0 with ``h_jr`` and downsample by ``2^jr``."""
    s = 2**jr
    z = sfft.ifft(sfft.fft(y, axis=0) * np.conj(plan.refine[jr])[:, None], axis=0).real
    return z[::s]


def _coarsen_adjoint(y: np.ndarray, plan: DsstPlan, jr: int) -> np.ndarray:
    s = 2**jr
    up = np.zeros((s * y.shape[0], y.shape[1]))
    up[::s] = y
    return sfft.ifft(sfft.fft(up, axis=0) * plan.refine[jr][:, None], axis=0).real


def digital_shear(img, j: int, k: int, plan: DsstPlan) -> np.ndarray:
    """Digital shear by ``2^-ceil(j/2) k``: refine, shear, filter back, coarsen."""
    jr = math.ceil(j / 2)
    if abs(k) > 2**jr:
        raise ValueError(f"shear {k} out of range for scale {j}")
    img = check_image(img, plan.n).astype(float)
    return _coarsen(_shear(_refined(img, plan, jr), k, plan, jr), plan, jr)


def _wavelet(c: np.ndarray, first: np.ndarray, p1: np.ndarray, second: np.ndarray,
             p2: np.ndarray) -> np.ndarray:
    """Circular correlation with the two spectra along the axes, then sampling."""
    a = sfft.ifft(sfft.fft(c, axis=0) * np.conj(first)[:, None], axis=0).real[p1]
    return sfft.ifft(sfft.fft(a, axis=1) * np.conj(second)[None, :], axis=1).real[:, p2]


def _wavelet_adjoint(w: np.ndarray, n: int, first, p1, second, p2) -> np.ndarray:
    a = np.zeros((len(p1), n))
    a[:, p2] = w
    a = sfft.ifft(sfft.fft(a, axis=1) * second[None, :], axis=1).real
    b = np.zeros((n, n))
    b[p1] = a
    return sfft.ifft(sfft.fft(b, axis=0) * first[:, None], axis=0).real


def aniso_wavelet(c, j1: int, j2: int, plan: DsstPlan) -> np.ndarray:
    """``sum_m g_j1(m1 - 2^j1 n1) h_j2(m2 - 2^j2 n2) c(m)`` with circular indices."""
    n = plan.n
    c = check_image(c, n).astype(float)
    return _wavelet(c, plan.g[j1].dft(n), np.arange(0, n, 2**j1),
                    plan.h[j2].dft(n), np.arange(0, n, 2**j2))


def dsst_forward(img, plan: DsstPlan) -> DSSTCoeffs:
    img = check_image(img, plan.n).astype(float)
    bands = {}
    for cone in CONES:
        x = img if cone == 1 else img.T
        for j in range(plan.scales):
            jr = math.ceil(j / 2)
            fine = _refined(x, plan, jr)
            first, p1, second, p2 = plan.stage[j]
            for k in shear_set(cone, j):
                sheared = _coarsen(_shear(fine, k, plan, jr), plan, jr)
                bands[(cone, j, k)] = _wavelet(sheared, first, p1, second, p2)
    hj, q1, q2 = plan.low_stage
    return DSSTCoeffs(bands, _wavelet(img, hj, q1, hj, q2))


def dsst_adjoint(c: DSSTCoeffs, plan: DsstPlan) -> np.ndarray:
    n = plan.n
    hj, q1, q2 = plan.low_stage
    out = _wavelet_adjoint(c.low, n, hj, q1, hj, q2)
    for cone in CONES:
        acc = np.zeros((n, n))
        for j in range(plan.scales):
            jr = math.ceil(j / 2)
            first, p1, second, p2 = plan.stage[j]
            fine = np.zeros((2**jr * n, n))
            for k in shear_set(cone, j):
                y = _wavelet_adjoint(c.bands[(cone, j, k)], n, first, p1, second, p2)
                fine += _shear(_coarsen_adjoint(y, plan, jr), k, plan, jr, adjoint=True)
            acc += _refined_adjoint(fine, plan, jr)
        out += acc if cone == 1 else acc.T
    return out


def dsst_inverse_cg(c: DSSTCoeffs, plan: DsstPlan, tol: float = 1e-10,
                    maxiter: int = 1000) -> CgResult:
    """Solve ``S^T S x = S^T c`` by conjugate gradients.

    ``S^T S`` has condition number near 1000 at the default sampling, so the
    residual tolerance must sit well below the wanted image accuracy.
    """
    b = dsst_adjoint(c, plan)
    return conjugate_gradient(lambda x: dsst_adjoint(dsst_forward(x, plan), plan), b,
                              tol=tol, maxiter=maxiter)


def frame_bounds(plan: DsstPlan, tol: float = 1e-6) -> tuple[float, float]:
    """Extreme eigenvalues of ``S^T S`` (Lanczos)."""
    n = plan.n

    def mv(x):
        return dsst_adjoint(dsst_forward(x.reshape(n, n), plan), plan).ravel()

    op = LinearOperator((n * n, n * n), matvec=mv, dtype=float)
    v0 = np.ones(n * n)
    try:
        hi = eigsh(op, k=1, which="LA", tol=tol, v0=v0, return_eigenvectors=False)[0]
        lo = eigsh(op, k=1, which="SA", tol=tol, v0=v0, return_eigenvectors=False)[0]
    except ArpackNoConvergence as exc:
        raise NumericalError(f"eigenvalue iteration did not converge: {exc}") from exc
    return float(lo), float(hi)


@dataclass(frozen=True)
class Redundancy:
    finite: Fraction
    limit: Fraction


def redundancy(scales: int, c1=1, c2=1) -> Redundancy:
    """Coefficients per pixel: ``(4/(c1 c2)) ((4^J + 2)/3) / 4^J`` and its limit."""
    c1 = Fraction(str(c1)) if not isinstance(c1, Fraction) else c1
    c2 = Fraction(str(c2)) if not isinstance(c2, Fraction) else c2
    if c1 <= 0 or c2 <= 0:
        raise ValueError("sampling constants must be positive")
    base = Fraction(4) / (c1 * c2)
    return Redundancy(base * Fraction(4**scales + 2, 3) / 4**scales, base / 3)
