"""Pseudo-polar grid geometry and the shared array containers.

Images are ``(N, N)`` float arrays whose entry ``[a, b]`` holds the sample
``I(u, v)`` with ``u = a - N/2`` and ``v = b - N/2``.

A pseudo-polar array keeps both sectors in one ``(2, RN+1, N+1)`` complex
array.  Entry ``[s, p, q]`` belongs to sector ``s + 1`` at radial index
``n = p - RN/2`` and slope index ``l = q - N/2``.  Points that lie on both
sectors (the seam lines and the origin) are stored once per copy.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np


class NumericalError(RuntimeError):
    """A computation could not reach its accuracy or convergence target."""


@dataclass(frozen=True)
class PPGridParams:
    """Size ``n`` of the image and radial oversampling ``r`` of the grid."""

    n: int
    r: int = 8

    def __post_init__(self):
        if self.n <= 0 or self.n % 2:
            raise ValueError(f"image size must be even and positive, got {self.n}")
        if self.r <= 0 or self.r % 2:
            raise ValueError(f"oversampling must be even and positive, got {self.r}")

    @property
    def m0(self) -> Fraction:
        return Fraction(2 * (self.r * self.n + 1), self.r)

    @property
    def rn(self) -> int:
        return self.r * self.n

    @property
    def sector_shape(self) -> tuple[int, int]:
        return (self.rn + 1, self.n + 1)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (2,) + self.sector_shape

    @property
    def radial_indices(self) -> np.ndarray:
        return np.arange(-self.rn // 2, self.rn // 2 + 1)

    @property
    def slope_indices(self) -> np.ndarray:
        return np.arange(-self.n // 2, self.n // 2 + 1)


class PointClass(enum.Flag):
    INTERIOR = 0
    CENTER = enum.auto()
    SEAM = enum.auto()
    BOUNDARY = enum.auto()


def _check_index(params: PPGridParams, sector: int, n: int, l: int):
    if sector not in (1, 2):
        raise ValueError(f"sector must be 1 or 2, got {sector}")
    if abs(n) > params.rn // 2 or abs(l) > params.n // 2:
        raise IndexError(f"grid index (n={n}, l={l}) out of range for {params}")


def grid_point(params: PPGridParams, sector: int, n: int, l: int) -> tuple[float, float]:
    """Frequency coordinates of the stored point ``(sector, n, l)``."""
    _check_index(params, sector, n, l)
    a, b = grid_point_exact(params, sector, n, l)
    return float(a), float(b)


def grid_point_exact(params: PPGridParams, sector: int, n: int, l: int) -> tuple[Fraction, Fraction]:
    _check_index(params, sector, n, l)
    rad = Fraction(2 * n, params.r)
    tilt = -rad * Fraction(2 * l, params.n)
    if sector == 1:
        return (tilt + 0, rad)
    return (rad, tilt + 0)


def grid_coordinates(params: PPGridParams) -> tuple[np.ndarray, np.ndarray]:
    """Arrays ``(w1, w2)`` of shape ``params.shape`` with every stored point."""
    n = params.radial_indices[:, None].astype(float)
    l = params.slope_indices[None, :].astype(float)
    rad = np.broadcast_to(2.0 * n / params.r, params.sector_shape)
    tilt = -(2.0 * n / params.r) * (2.0 * l / params.n)
    w1 = np.stack([tilt, rad])
    w2 = np.stack([rad, tilt])
    return w1 + 0.0, w2 + 0.0


def classify_point(params: PPGridParams, sector: int, n: int, l: int) -> PointClass:
    _check_index(params, sector, n, l)
    if n == 0:
        return PointClass.CENTER
    flags = PointClass.INTERIOR
    if abs(l) == params.n // 2:
        flags |= PointClass.SEAM
    if abs(n) == params.rn // 2:
        flags |= PointClass.BOUNDARY
    return flags


def grid_multiplicity(params: PPGridParams) -> np.ndarray:
    """How often the point behind each stored index is stored overall."""
    mult = np.ones(params.shape, dtype=np.int64)
    mult[:, :, 0] = 2
    mult[:, :, -1] = 2
    mult[:, params.rn // 2, :] = 2 * (params.n + 1)
    return mult


def distinct_point_count(params: PPGridParams) -> int:
    """Number of distinct grid points, found by exact deduplication."""
    pts = set()
    for sector in (1, 2):
        for n in params.radial_indices:
            for l in params.slope_indices:
                pts.add(grid_point_exact(params, sector, int(n), int(l)))
    return len(pts)


@dataclass
class PPArray:
    """Complex values on the pseudo-polar grid, both sectors stacked."""

    params: PPGridParams
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.data = np.asarray(self.data)
        if self.data.shape != self.params.shape:
            raise ValueError(f"expected shape {self.params.shape}, got {self.data.shape}")

    @classmethod
    def zeros(cls, params: PPGridParams) -> PPArray:
        return cls(params, np.zeros(params.shape, dtype=complex))

    @property
    def sector1(self) -> np.ndarray:
        return self.data[0]

    @property
    def sector2(self) -> np.ndarray:
        return self.data[1]

    def copy(self) -> PPArray:
        return PPArray(self.params, self.data.copy())

    def _other(self, other):
        if isinstance(other, PPArray):
            if other.params != self.params:
                raise ValueError("pseudo-polar arrays live on different grids")
            return other.data
        return other

    def __add__(self, other):
        return PPArray(self.params, self.data + self._other(other))

    def __sub__(self, other):
        return PPArray(self.params, self.data - self._other(other))

    def __mul__(self, other):
        return PPArray(self.params, self.data * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return PPArray(self.params, self.data / self._other(other))

    def vdot(self, other: PPArray) -> complex:
        """Inner product summed over every stored index."""
        return complex(np.vdot(other.data, self.data))

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))

    def omega_vdot(self, other: PPArray) -> complex:
        """Inner product over distinct grid points (copies share the weight)."""
        mult = _multiplicity_cached(self.params)
        return complex(np.vdot(other.data, self.data / mult))

    def omega_norm(self) -> float:
        return float(np.sqrt(self.omega_vdot(self).real))


_MULT_CACHE: dict[PPGridParams, np.ndarray] = {}


def _multiplicity_cached(params: PPGridParams) -> np.ndarray:
    if params not in _MULT_CACHE:
        _MULT_CACHE[params] = grid_multiplicity(params)
    return _MULT_CACHE[params]


def seam_pairs(params: PPGridParams) -> tuple[np.ndarray, np.ndarray]:
    """Flat index pairs ``(i, j)`` of stored copies of the same seam point."""
    rn2 = params.rn // 2
    p = np.array([i for i in range(params.rn + 1) if i != rn2])
    shape = params.shape
    out_a, out_b = [], []
    for q, twin in ((0, p), (params.n, 2 * rn2 - p)):
        # sector 2 point (n, -N/2) equals sector 1 point (n, -N/2);
        # sector 2 point (n, N/2) equals sector 1 point (-n, N/2)
        a = np.ravel_multi_index((np.ones_like(p), p, np.full_like(p, q)), shape)
        b = np.ravel_multi_index((np.zeros_like(p), twin, np.full_like(p, q)), shape)
        out_a.append(a)
        out_b.append(b)
    return np.concatenate(out_a), np.concatenate(out_b)


def is_seam_consistent(a: PPArray, tol: float = 1e-12) -> bool:
    """True when every copy of a repeated grid point holds the same value."""
    flat = a.data.ravel()
    i, j = seam_pairs(a.params)
    scale = max(float(np.abs(flat).max()), 1.0)
    if np.abs(flat[i] - flat[j]).max(initial=0.0) > tol * scale:
        return False
    centre = a.data[:, a.params.rn // 2, :]
    return bool(np.abs(centre - centre.flat[0]).max() <= tol * scale)


def check_image(img: np.ndarray, n: int | None = None) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim != 2 or img.shape[0] != img.shape[1]:
        raise ValueError(f"expected a square image, got shape {img.shape}")
    if img.shape[0] % 2:
        raise ValueError("image side must be even")
    if n is not None and img.shape[0] != n:
        raise ValueError(f"image is {img.shape[0]}x{img.shape[0]}, expected {n}x{n}")
    return img


@dataclass
class CgResult:
    image: np.ndarray
    iterations: int
    converged: bool
    residuals: list[float]
    imag_norm: float


def conjugate_gradient(apply, b: np.ndarray, tol: float = 1e-6, maxiter: int = 200,
                       x0: np.ndarray | None = None) -> CgResult:
    """Plain CG for a self-adjoint positive operator; residuals are relative to ``||b||``."""
    x = np.zeros_like(b) if x0 is None else x0.astype(b.dtype, copy=True)
    r = b - apply(x) if x0 is not None else b.copy()
    bnorm = np.linalg.norm(b)
    if bnorm == 0:
        return CgResult(x, 0, True, [0.0], 0.0)
    d = r.copy()
    rr = np.vdot(r, r).real
    history = [np.sqrt(rr) / bnorm]
    it = 0
    while history[-1] > tol and it < maxiter:
        q = apply(d)
        alpha = rr / np.vdot(d, q).real
        x = x + alpha * d
        r = r - alpha * q
        rr_new = np.vdot(r, r).real
        d = r + (rr_new / rr) * d
        rr = rr_new
        it += 1
        history.append(np.sqrt(rr) / bnorm)
    return CgResult(x, it, history[-1] <= tol, history, 0.0)
