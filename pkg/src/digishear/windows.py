"""Meyer-type windows, the digital shearlet system and the windowing operator.

Cones are labelled ``11, 12`` (sector 1, radial index ``n > 0`` / ``n < 0``)
and ``21, 22`` (sector 2).  All four share the index geometry of cone 21 with
``n`` replaced by ``|n|``, so cone ``x2`` holds the point reflection of cone
``x1``.  A band ``(cone, j, k)`` covers an ``L1 x L2`` rectangle of stored
indices; its coefficients are

    c[r1, r2] = sum_{n, l} C J W V exp(-2 pi i (r1 |n| / L1 + r2 l / L2)) / sqrt(L1 L2)

for ``r1 < L1``, ``r2 < L2``, where ``C = 1/sqrt(mult)`` splits repeated grid
points evenly among their stored copies.  The two scaling bands use the
rectangle ``n = -1..1``, ``l = -N/2..N/2`` with centered ``r``.

Analysis ``W`` is then an isometry from the distinct-point inner product on
the grid to the plain coefficient inner product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft as sfft

from .core import PPArray, PPGridParams, grid_coordinates, grid_multiplicity

CONES = (11, 12, 21, 22)


def nu(x):
    """Polynomial ramp ``x^4 (35 - 84x + 70x^2 - 20x^3)`` clamped to [0, 1]."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    # the polynomial cancels badly near 1; use nu(x) = 1 - nu(1 - x) there
    t = np.minimum(x, 1.0 - x)
    low = t**4 * (35 - 84 * t + 70 * t**2 - 20 * t**3)
    return np.where(x <= 0.5, low, 1.0 - low)


@dataclass(frozen=True)
class WindowSpec:
    """The ramp ``nu`` and the windows built from it."""

    ramp: object = nu

    def w0(self, xi):
        a = np.abs(np.asarray(xi, dtype=float))
        out = np.cos(0.5 * np.pi * self.ramp(4.0 / 3.0 * a - 1.0 / 3.0))
        out = np.where(a <= 0.25, 1.0, out)
        return np.where(a >= 1.0, 0.0, out)

    def w(self, xi):
        a = np.abs(np.asarray(xi, dtype=float))
        low = np.sin(0.5 * np.pi * self.ramp(4.0 / 3.0 * a - 1.0 / 3.0))
        high = np.cos(0.5 * np.pi * self.ramp(a / 3.0 - 1.0 / 3.0))
        out = np.where(a <= 1.0, low, high)
        return np.where((a <= 0.25) | (a >= 4.0), 0.0, out)

    def v(self, xi):
        a = np.abs(np.asarray(xi, dtype=float))
        return np.where(a >= 1.0, 0.0, np.sqrt(self.ramp(1.0 - a)))

    def v0(self, xi):
        return np.ones_like(np.asarray(xi, dtype=float))

    def values(self, which: str, xi):
        table = {"W0": self.w0, "W": self.w, "V": self.v, "V0": self.v0}
        if which not in table:
            raise ValueError(f"unknown window {which!r}")
        return table[which](xi)


def window_values(spec: WindowSpec, which: str, xi):
    return spec.values(which, xi)


def cone_sector(cone: int) -> tuple[int, int]:
    """Storage sector (0 or 1) and the sign of ``n`` covered by a cone."""
    if cone not in CONES:
        raise ValueError(f"unknown cone {cone}")
    return cone // 10 - 1, 1 if cone % 10 == 1 else -1


@dataclass(frozen=True)
class Band:
    cone: int
    j: int
    k: int
    n_lo: int
    l1: int
    l_lo: int
    l2: int

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.cone, self.j, self.k)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.l1, self.l2)

    @property
    def size(self) -> int:
        return self.l1 * self.l2


def scale_range(params: PPGridParams) -> tuple[int, int]:
    j_low = -math.ceil(math.log(params.r / 2, 4) - 1e-12) if params.r > 2 else 0
    j_high = math.ceil(math.log(params.n, 4) - 1e-12)
    return j_low, j_high


def shear_range(j: int) -> range:
    return range(-(2**j), 2**j + 1) if j >= 0 else range(0, 1)


@dataclass(frozen=True)
class SubbandLayout:
    """All bands of the system with their index rectangles."""

    params: PPGridParams
    j_low: int
    j_high: int
    bands: tuple[Band, ...] = field(repr=False)

    @property
    def scaling_shape(self) -> tuple[int, int]:
        return (3, self.params.n + 1)

    @property
    def count(self) -> int:
        return 2 * 3 * (self.params.n + 1) + sum(b.size for b in self.bands)

    @property
    def redundancy(self) -> float:
        return self.count / self.params.n**2

    @cached_property
    def index(self) -> dict[tuple[int, int, int], Band]:
        return {b.key: b for b in self.bands}

    def band(self, cone: int, j: int, k: int) -> Band:
        try:
            return self.index[(cone, j, k)]
        except KeyError:
            raise KeyError(f"no band (cone={cone}, j={j}, k={k})") from None


def _radial_extent(params: PPGridParams, j: int, j_low: int) -> tuple[int, int]:
    top = params.rn // 2
    if j == j_low:
        lo = 1
    else:
        lo = math.ceil(4.0 ** (j - 1) * params.r / 2)
    hi = top if j == scale_range(params)[1] else min(math.floor(4.0 ** (j + 1) * params.r / 2), top)
    return lo, hi - lo + 1


def _angular_extent(params: PPGridParams, j: int, k: int) -> tuple[int, int]:
    nn = params.n
    if j < 0:
        return -nn // 2, nn + 1
    step = nn >> (j + 1)
    if step << (j + 1) != nn:
        raise ValueError(f"scale {j} is too fine for N={nn}")
    if k == -(2**j):
        return -nn // 2, step + 1
    if k == 2**j:
        return step * (k - 1), step + 1
    return step * (k - 1), 2 * step + 1


def layout(params: PPGridParams) -> SubbandLayout:
    """Band geometry for every cone, scale and shear."""
    if params.n & (params.n - 1):
        raise ValueError(f"image size must be a power of two, got {params.n}")
    j_low, j_high = scale_range(params)
    bands = []
    for cone in CONES:
        for j in range(j_low, j_high + 1):
            n_lo, l1 = _radial_extent(params, j, j_low)
            if l1 <= 0:
                continue
            for k in shear_range(j):
                l_lo, l2 = _angular_extent(params, j, k)
                bands.append(Band(cone, j, k, n_lo, l1, l_lo, l2))
    return SubbandLayout(params, j_low, j_high, tuple(bands))


@dataclass
class FDSTCoeffs:
    """Scaling coefficients per sector and one array per band."""

    layout: SubbandLayout
    scaling: list[np.ndarray]
    bands: dict[tuple[int, int, int], np.ndarray]

    @classmethod
    def zeros(cls, lay: SubbandLayout) -> FDSTCoeffs:
        return cls(
            lay,
            [np.zeros(lay.scaling_shape, dtype=complex) for _ in range(2)],
            {b.key: np.zeros(b.shape, dtype=complex) for b in lay.bands},
        )

    def arrays(self) -> list[np.ndarray]:
        """Scaling arrays then bands, in layout order."""
        return list(self.scaling) + [self.bands[b.key] for b in self.layout.bands]

    def to_vector(self) -> np.ndarray:
        return np.concatenate([a.ravel() for a in self.arrays()])

    @classmethod
    def from_vector(cls, lay: SubbandLayout, vec: np.ndarray) -> FDSTCoeffs:
        vec = np.asarray(vec)
        if vec.size != lay.count:
            raise ValueError(f"expected {lay.count} coefficients, got {vec.size}")
        out, pos = [], 0
        for shape in [lay.scaling_shape] * 2 + [b.shape for b in lay.bands]:
            size = shape[0] * shape[1]
            out.append(vec[pos:pos + size].reshape(shape).astype(complex))
            pos += size
        return cls(lay, out[:2], {b.key: a for b, a in zip(lay.bands, out[2:])})

    def norm(self) -> float:
        return float(np.linalg.norm(self.to_vector()))

    def __sub__(self, other: FDSTCoeffs) -> FDSTCoeffs:
        return FDSTCoeffs.from_vector(self.layout, self.to_vector() - other.to_vector())


class WindowPlan:
    """Precomputed separable window factors and phases for every band."""

    def __init__(self, params: PPGridParams, spec: WindowSpec | None = None):
        self.params = params
        self.spec = spec or WindowSpec()
        self.layout = layout(params)
        mult = grid_multiplicity(params)
        self.c_factor = 1.0 / np.sqrt(mult)
        self.mult = mult
        nn, r = params.n, params.r
        rn2 = params.rn // 2
        self._band_data = []
        for b in self.layout.bands:
            s, sign = cone_sector(b.cone)
            n = b.n_lo + np.arange(b.l1)
            l = b.l_lo + np.arange(b.l2)
            radial = self.spec.w(4.0 ** (-b.j) * 2.0 * n / r)
            if b.j >= 0:
                angular = self.spec.v(b.k - 2.0 ** (b.j + 1) * l / nn)
            else:
                angular = self.spec.v0(l)
            rows = rn2 + sign * n
            rows = slice(rows[0], rows[-1] + sign if rows[-1] + sign >= 0 else None, sign)
            cols = slice(nn // 2 + b.l_lo, nn // 2 + b.l_lo + b.l2)
            ph1 = np.exp(-2j * np.pi * np.arange(b.l1) * (b.n_lo % b.l1) / b.l1)
            ph2 = np.exp(-2j * np.pi * np.arange(b.l2) * (b.l_lo % b.l2) / b.l2)
            self._band_data.append((b, s, rows, cols, radial[:, None] * angular[None, :], ph1, ph2))
        # scaling bands: rows n = -1..1, centered DFT of size 3 x (N+1)
        n = np.arange(-1, 2)
        self._scaling_window = self.spec.w0(4.0 ** (-self.layout.j_low) * 2.0 * n / r)
        self._scaling_rows = slice(rn2 - 1, rn2 + 2)

    def _scaling_forward(self, x: np.ndarray) -> np.ndarray:
        # centered input and output indices: shift, transform, shift back
        y = sfft.fft2(sfft.ifftshift(x), norm="ortho")
        return sfft.fftshift(y)

    def _scaling_adjoint(self, c: np.ndarray) -> np.ndarray:
        return sfft.fftshift(sfft.ifft2(sfft.ifftshift(c), norm="ortho"))

    def apply(self, a: PPArray) -> FDSTCoeffs:
        if a.params != self.params:
            raise ValueError("array does not match the window layout")
        jc = a.data * self.c_factor
        scaling = [
            self._scaling_forward(jc[s, self._scaling_rows, :] * self._scaling_window[:, None])
            for s in (0, 1)
        ]
        bands = {}
        for b, s, rows, cols, win, ph1, ph2 in self._band_data:
            x = jc[s, rows, cols] * win
            bands[b.key] = sfft.fft2(x, norm="ortho") * (ph1[:, None] * ph2[None, :])
        return FDSTCoeffs(self.layout, scaling, bands)

    def adjoint_stored(self, c: FDSTCoeffs) -> PPArray:
        """Adjoint of :meth:`apply` for the plain sum over stored indices."""
        if c.layout.params != self.params:
            raise ValueError("coefficients do not match the window layout")
        out = np.zeros(self.params.shape, dtype=complex)
        for s in (0, 1):
            x = self._scaling_adjoint(c.scaling[s])
            out[s, self._scaling_rows, :] += x * self._scaling_window[:, None]
        for b, s, rows, cols, win, ph1, ph2 in self._band_data:
            y = c.bands[b.key] * np.conj(ph1[:, None] * ph2[None, :])
            out[s, rows, cols] += sfft.ifft2(y, norm="ortho") * win
        return PPArray(self.params, out * self.c_factor)

    def adjoint(self, c: FDSTCoeffs) -> PPArray:
        """Adjoint of :meth:`apply` for the distinct-point inner product."""
        a = self.adjoint_stored(c)
        return PPArray(self.params, a.data * self.mult)


_PLANS: dict[tuple[PPGridParams, WindowSpec], WindowPlan] = {}


def window_plan(params: PPGridParams, spec: WindowSpec | None = None) -> WindowPlan:
    spec = spec or WindowSpec()
    key = (params, spec)
    if key not in _PLANS:
        _PLANS[key] = WindowPlan(params, spec)
    return _PLANS[key]


def window_apply(a: PPArray, spec: WindowSpec | None = None) -> FDSTCoeffs:
    return window_plan(a.params, spec).apply(a)


def window_adjoint(c: FDSTCoeffs, spec: WindowSpec | None = None) -> PPArray:
    """Synthesis ``W^dagger`` with ``W^dagger W = Id`` on every stored array."""
    return window_plan(c.layout.params, spec).adjoint(c)


def window_adjoint_stored(c: FDSTCoeffs, spec: WindowSpec | None = None) -> PPArray:
    return window_plan(c.layout.params, spec).adjoint_stored(c)


def _cone_coordinates(params: PPGridParams):
    """Radial and tilted coordinates of every stored point, per sector."""
    w1, w2 = grid_coordinates(params)
    rad = np.stack([w2[0], w1[1]])
    tilt = np.stack([w1[0], w2[1]])
    return rad, tilt


def shearlet_values(
    lay: SubbandLayout,
    cone: int,
    j: int,
    k: int,
    m: tuple[int, int] = (0, 0),
    spec: WindowSpec | None = None,
) -> PPArray:
    """One digital shearlet evaluated pointwise on the grid.

    ``m = (r1, r2)`` indexes the band rectangle; the coefficient of an array
    ``J`` is ``sum over stored indices of J * conj(sigma)``.
    """
    spec = spec or WindowSpec()
    p = lay.params
    b = lay.band(cone, j, k)
    r1, r2 = m
    if not (0 <= r1 < b.l1 and 0 <= r2 < b.l2):
        raise IndexError(f"position {m} outside the {b.shape} band rectangle")
    s, sign = cone_sector(cone)
    rad, tilt = _cone_coordinates(p)
    a = np.abs(rad[s])
    with np.errstate(divide="ignore", invalid="ignore"):
        slope = np.where(a > 0, tilt[s] / rad[s], 0.0)
    m1 = 4.0**j * (p.r / 2) * r1 / b.l1
    m2 = -(p.n / 2.0 ** (j + 1)) * r2 / b.l2
    ang = spec.v(k + 2.0**j * slope) if j >= 0 else spec.v0(slope)
    val = spec.w(4.0 ** (-j) * a) * ang * np.exp(2j * np.pi * (m1 * 4.0 ** (-j) * a + m2 * 2.0**j * slope))
    n_index = p.radial_indices[:, None]
    val = np.where(sign * n_index > 0, val, 0.0)
    out = np.zeros(p.shape, dtype=complex)
    out[s] = val / np.sqrt(grid_multiplicity(p)[s]) / np.sqrt(b.size)
    return PPArray(p, out)


def scaling_values(
    lay: SubbandLayout,
    sector: int,
    n0: tuple[int, int] = (0, 0),
    spec: WindowSpec | None = None,
) -> PPArray:
    """Scaling function of sector ``sector`` (1 or 2) at centered position ``n0``."""
    spec = spec or WindowSpec()
    p = lay.params
    r1, r2 = n0
    rad, _ = _cone_coordinates(p)
    s = sector - 1
    n = p.radial_indices[:, None]
    l = p.slope_indices[None, :]
    val = spec.w0(4.0 ** (-lay.j_low) * rad[s]) * np.exp(2j * np.pi * (r1 * n / 3 + r2 * l / (p.n + 1)))
    val = np.where(np.abs(n) <= 1, val, 0.0)
    out = np.zeros(p.shape, dtype=complex)
    out[s] = val / np.sqrt(grid_multiplicity(p)[s]) / np.sqrt(3 * (p.n + 1))
    return PPArray(p, out)
