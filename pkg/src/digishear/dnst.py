"""Digital non-separable shearlet transform with fan-filtered generators.

Every filter is held as its ``N x N`` DFT.  The undecimated transform is a
circular correlation per band; reconstruction convolves with dual filters
``psi / D`` where ``D`` sums ``|psi|^2`` over all bands plus the lowpass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft
from scipy import ndimage

from .core import CgResult, NumericalError, check_image, conjugate_gradient
from .dsst import DsstPlan, FilterPair, _coarsen, _refined, iterated_filters
from . import kernels

CONES = (1, 2)


@dataclass(frozen=True)
class FanFilter:
    """Zero-phase taps; ``taps[size//2, size//2]`` is the origin."""

    taps: np.ndarray = field(repr=False)
    tau: float

    @property
    def size(self) -> int:
        return self.taps.shape[0]

    def dft(self, n: int) -> np.ndarray:
        """``P`` sampled on the ``n x n`` DFT grid (exact for any ``n``)."""
        c = self.size // 2
        grid = np.zeros((n, n))
        idx = (np.arange(self.size) - c) % n
        np.add.at(grid, (idx[:, None], idx[None, :]), self.taps)
        return sfft.fft2(grid).real

    def response(self, xi1, xi2) -> np.ndarray:
        c = self.size // 2
        m = np.arange(self.size) - c
        e1 = np.cos(2 * np.pi * np.multiply.outer(np.asarray(xi1, float), m))
        e2 = np.cos(2 * np.pi * np.multiply.outer(np.asarray(xi2, float), m))
        # zero-phase and symmetric in each axis, so only cosines remain
        return np.einsum("...a,ab,...b->...", e1, self.taps, e2)


def ideal_fan(xi1, xi2, tau: float) -> np.ndarray:
    """Horizontal fan with a raised-cosine edge in the slope ``|xi2| / |xi1|``."""
    a1, a2 = np.abs(xi1), np.abs(xi2)
    t = np.where(a1 > 0, a2 / np.where(a1 > 0, a1, 1.0), np.inf)
    ramp = 0.5 * (1 + np.cos(np.pi * (np.clip(t, 0, 2) - (1 - tau)) / (2 * tau)))
    out = np.where(t <= 1 - tau, 1.0, np.where(t >= 1 + tau, 0.0, ramp))
    return np.where((a1 == 0) & (a2 == 0), 0.5, out)


def transition_distance(grid: int, tau: float) -> np.ndarray:
    """Periodic distance of each DFT-grid frequency to the transition cone."""
    xi = np.fft.fftfreq(grid)
    x1, x2 = np.meshgrid(xi, xi, indexing="ij")
    a1, a2 = np.abs(x1), np.abs(x2)
    trans = ~((a2 <= (1 - tau) * a1) | (a2 >= (1 + tau) * a1))
    trans[0, 0] = True
    tiled = np.tile(trans, (3, 3))
    return ndimage.distance_transform_edt(~tiled)[grid:2 * grid, grid:2 * grid] / grid


def fan_error(fan: FanFilter, grid: int = 256, guard: float | None = None) -> float:
    """Largest deviation from the ideal fan away from the transition cone.

    Frequencies closer than ``guard`` (default ``2 / size``, the main-lobe
    half-width of the Hann window) to the raised-cosine region are skipped;
    this also skips the origin and the corners, where the cone edges meet.
    """
    guard = 2.0 / fan.size if guard is None else guard
    xi = np.fft.fftfreq(grid)
    x1, x2 = np.meshgrid(xi, xi, indexing="ij")
    err = np.abs(fan.dft(grid) - ideal_fan(x1, x2, fan.tau))
    return float(err[transition_distance(grid, fan.tau) >= guard].max())


def fan_filter(size: int = 33, tau: float = 0.15, tolerance: float = 0.05,
               oversample: int = 16) -> FanFilter:
    """Frequency-sampled fan, cropped with a Hann window and symmetrized."""
    if size % 2 == 0 or size < 9:
        raise ValueError("fan filter size must be odd and at least 9")
    if not 0 < tau < 0.5:
        raise ValueError("transition width must lie in (0, 0.5)")
    m = oversample * size
    xi = np.fft.fftfreq(m)
    x1, x2 = np.meshgrid(xi, xi, indexing="ij")
    taps = sfft.fftshift(sfft.ifft2(ideal_fan(x1, x2, tau)).real)
    c = m // 2
    h = size // 2
    taps = taps[c - h:c + h + 1, c - h:c + h + 1]
    win = np.hanning(size + 2)[1:-1]
    taps = taps * np.outer(win, win)
    taps = 0.25 * (taps + taps[::-1] + taps[:, ::-1] + taps[::-1, ::-1])
    fan = FanFilter(taps, tau)
    err = fan_error(fan)
    if err > tolerance:
        raise NumericalError(f"fan filter misses the ideal response by {err:.3f} > {tolerance}")
    return fan


def shear_set(j: int) -> range:
    s = 2 ** math.ceil(j / 2)
    return range(-s, s + 1)


@dataclass
class DNSTFilterBank:
    n: int
    scales: int
    spectra: dict[tuple[int, int, int], np.ndarray] = field(repr=False)
    lowpass: np.ndarray = field(repr=False)
    denominator: np.ndarray = field(repr=False)
    duals: dict[tuple[int, int, int], np.ndarray] = field(repr=False)
    dual_lowpass: np.ndarray = field(repr=False)

    @property
    def keys(self) -> list[tuple[int, int, int]]:
        return sorted(self.spectra)

    @property
    def band_count(self) -> int:
        return len(self.spectra) + 1

    def taps(self, key) -> np.ndarray:
        """Spatial taps of a band, origin at the array center."""
        return sfft.fftshift(sfft.ifft2(self.spectra[key]).real)


def _sheared_filter(spec: np.ndarray, j: int, k: int, plan: DsstPlan) -> np.ndarray:
    """Digital shear of a filter given by its spectrum, sheared about its origin."""
    jr = math.ceil(j / 2)
    taps = sfft.fftshift(sfft.ifft2(spec).real)
    fine = _refined(taps, plan, jr)
    out = _coarsen(kernels.shear_rows(fine, k, plan.n // 2), plan, jr)
    return sfft.fft2(sfft.ifftshift(out))


def dnst_filters(scales: int, n: int, pair: FilterPair | None = None,
                 fan: FanFilter | None = None, eps: float = 1e-6) -> DNSTFilterBank:
    if scales < 1:
        raise ValueError("need at least one scale")
    pair = pair or FilterPair.maxflat(4)
    fan = fan or fan_filter()
    plan = DsstPlan(n, scales, pair=pair)
    hs, gs = iterated_filters(pair, scales)
    p_grid = fan.dft(n)
    q = np.arange(n)
    spectra = {}
    for j in range(scales):
        js = j // 2
        # P(2^(J-j) xi1, 2^(J-js+1) xi2) with xi in units of the Nyquist frequency
        p_dil = p_grid[np.ix_((q * 2 ** (scales - j - 1)) % n, (q * 2 ** (scales - js)) % n)]
        base = p_dil * np.outer(gs[scales - j].dft(n), hs[scales - js].dft(n))
        # unit spectral peak per scale keeps D near 1 instead of growing with scale
        base = base / np.abs(base).max()
        for k in shear_set(j):
            # shearing the filter by -k matches shearing the image by k, so band
            # (j, k) here has the orientation of band (j, k) in the separable transform
            sheared = _sheared_filter(base, j, -k, plan)
            spectra[(1, j, k)] = sheared
            spectra[(2, j, k)] = sheared.T
    hj = hs[scales].dft(n) / 2 ** (scales / 2)
    lowpass = np.outer(hj, hj)
    denom = np.abs(lowpass) ** 2
    for s in spectra.values():
        denom = denom + np.abs(s) ** 2
    if denom.min() < eps:
        raise NumericalError(f"filter bank does not cover all frequencies (min D = {denom.min():.2e})")
    duals = {key: s / denom for key, s in spectra.items()}
    return DNSTFilterBank(n, scales, spectra, lowpass, denom, duals, lowpass / denom)


@dataclass
class DNSTCoeffs:
    bands: dict[tuple[int, int, int], np.ndarray]
    low: np.ndarray

    def arrays(self) -> list[np.ndarray]:
        return [self.low] + [self.bands[key] for key in sorted(self.bands)]

    def to_vector(self) -> np.ndarray:
        return np.concatenate([a.ravel() for a in self.arrays()])

    def like(self, vec: np.ndarray) -> DNSTCoeffs:
        out, pos = [], 0
        for a in self.arrays():
            out.append(np.asarray(vec[pos:pos + a.size]).reshape(a.shape))
            pos += a.size
        return DNSTCoeffs(dict(zip(sorted(self.bands), out[1:])), out[0])

    @property
    def count(self) -> int:
        return sum(a.size for a in self.arrays())


def dnst_forward(img, bank: DNSTFilterBank) -> DNSTCoeffs:
    """Undecimated transform: circular correlation with every band filter."""
    img = check_image(img, bank.n).astype(float)
    f = sfft.fft2(img)
    bands = {key: sfft.ifft2(f * np.conj(s)).real for key, s in bank.spectra.items()}
    return DNSTCoeffs(bands, sfft.ifft2(f * np.conj(bank.lowpass)).real)


def _band_lattice(bank: DNSTFilterBank, key, c1: float, c2: float):
    cone, j, _ = key
    s1 = 2 ** (bank.scales - j) * c1
    s2 = 2 ** (bank.scales - j // 2) * c2
    if cone == 2:
        s1, s2 = s2, s1
    return _lattice(bank.n, s1), _lattice(bank.n, s2)


def dnst_decimated(img, bank: DNSTFilterBank, c1: float = 1.0, c2: float = 1.0) -> DNSTCoeffs:
    """Coefficients sampled on the ``(2^(J-j) c1, 2^(J-floor(j/2)) c2)`` lattice."""
    full = dnst_forward(img, bank)
    out = {}
    for key, band in full.bands.items():
        p1, p2 = _band_lattice(bank, key, c1, c2)
        out[key] = band[np.ix_(p1, p2)]
    s = 2**bank.scales
    return DNSTCoeffs(out, full.low[::s, ::s])


def dnst_decimated_adjoint(c: DNSTCoeffs, bank: DNSTFilterBank, c1: float = 1.0,
                           c2: float = 1.0) -> np.ndarray:
    """Adjoint of :func:`dnst_decimated`: zero-fill each band, then correlate back."""
    n, s = bank.n, 2**bank.scales
    low = np.zeros((n, n))
    low[::s, ::s] = c.low
    bands = {}
    for key in bank.spectra:
        full = np.zeros((n, n))
        full[np.ix_(*_band_lattice(bank, key, c1, c2))] = c.bands[key]
        bands[key] = full
    return dnst_adjoint(DNSTCoeffs(bands, low), bank)


def dnst_inverse_cg(c: DNSTCoeffs, bank: DNSTFilterBank, c1: float = 1.0, c2: float = 1.0,
                    tol: float = 1e-10, maxiter: int = 1000) -> CgResult:
    """Least-squares inverse of the decimated transform by conjugate gradients."""
    b = dnst_decimated_adjoint(c, bank, c1, c2)
    return conjugate_gradient(
        lambda x: dnst_decimated_adjoint(dnst_decimated(x, bank, c1, c2), bank, c1, c2),
        b, tol=tol, maxiter=maxiter)


def _lattice(n: int, step: float) -> np.ndarray:
    count = n / step
    if abs(count - round(count)) > 1e-9:
        raise ValueError(f"sampling step {step} does not divide N={n}")
    return np.floor(step * np.arange(round(count)) + 0.5).astype(int) % n


def dnst_adjoint(c: DNSTCoeffs, bank: DNSTFilterBank) -> np.ndarray:
    acc = sfft.fft2(c.low) * bank.lowpass
    for key, s in bank.spectra.items():
        acc = acc + sfft.fft2(c.bands[key]) * s
    return sfft.ifft2(acc).real


def dnst_reconstruct(c: DNSTCoeffs, bank: DNSTFilterBank) -> np.ndarray:
    """Sum of dual-filter convolutions of the undecimated bands."""
    if set(c.bands) != set(bank.duals):
        raise ValueError("coefficients do not match the filter bank")
    acc = sfft.fft2(c.low) * bank.dual_lowpass
    for key in sorted(bank.duals):
        acc = acc + sfft.fft2(c.bands[key]) * bank.duals[key]
    return sfft.ifft2(acc).real


def redundancy(scales: int) -> int:
    """Number of undecimated bands, each the size of the image."""
    return 2 * sum(2 * 2 ** math.ceil(j / 2) + 1 for j in range(scales)) + 1
