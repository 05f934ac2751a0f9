"""Seeded performance measures for the three transforms and a wavelet mock.

Measures only talk to a :class:`Transform` adapter: forward, adjoint,
inverse, flat coefficient vectors, band iteration and an analyzing-element
picture.  Band keys are ``(group, j, k)`` with ``group 0`` for elements whose
frequency support lies along array axis 0 (they respond to edges
``u + slope v = 0``) and ``group 1`` for the transposed family.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np
import scipy.fft as sfft
from scipy.special import erf, ndtri

from . import dnst as _dnst
from . import dsst as _dsst
from . import kernels
from .core import PPArray, PPGridParams, conjugate_gradient
from .fdst import FdstPlan, fdst_adjoint, fdst_forward, fdst_inverse_cg, gram, one_hot
from .weights import gram_condition, unit_weights, weights_for
from .windows import FDSTCoeffs, nu

TRANSFORMS = ("fdst", "dsst", "dnst", "wavelet")
DECAY_FLOOR = 1e-15


# ---------------------------------------------------------------- config/report


def default_scales(n: int) -> int:
    """``min(4, log2(N) - 3)``, at least one."""
    return max(1, min(4, int(math.log2(n)) - 3))


@dataclass(frozen=True)
class MeasureConfig:
    transform: str = "fdst"
    size: int = 64
    seed: int = 42
    trials: int = 5
    oversampling: int = 8
    weights: int = 1
    scales: int | None = None
    c1: float = 1.0
    c2: float = 1.0

    def __post_init__(self):
        if self.transform not in TRANSFORMS:
            raise ValueError(f"unknown transform {self.transform!r}")
        if self.size < 8 or self.size & (self.size - 1):
            raise ValueError(f"size must be a power of two >= 8, got {self.size}")
        if self.trials < 1:
            raise ValueError("need at least one trial")

    @property
    def resolved_scales(self) -> int:
        if self.scales is not None:
            return self.scales
        return default_scales(self.size)

    def with_size(self, size: int) -> MeasureConfig:
        d = asdict(self)
        d["size"] = size
        return MeasureConfig(**d)


@dataclass
class MeasureReport:
    measure: int
    name: str
    values: dict[str, float] = field(default_factory=dict)
    curves: dict[str, list[tuple[float, float]]] = field(default_factory=dict)
    notes: dict[str, str] = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    runtime: float = 0.0
    timing_keys: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "measure": self.measure,
            "name": self.name,
            "values": self.values,
            "curves": {k: [list(p) for p in v] for k, v in self.curves.items()},
            "notes": self.notes,
            "config": self.config,
            "runtime": self.runtime,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=_json_float)

    def digest(self) -> str:
        """Hash of everything except wall-clock quantities."""
        d = self.to_dict()
        d.pop("runtime")
        d["values"] = {k: v for k, v in d["values"].items() if k not in self.timing_keys}
        d["curves"] = {k: v for k, v in d["curves"].items() if k not in self.timing_keys}
        blob = json.dumps(d, sort_keys=True, default=_json_float).encode()
        return hashlib.sha256(blob).hexdigest()

    def write(self, out_dir) -> list[Path]:
        """One CSV of scalars, one CSV per curve and a JSON summary."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        stem = f"m{self.measure}_{self.config.get('transform', 'x')}"
        paths = [out / f"{stem}.csv", out / f"{stem}.json"]
        with paths[0].open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["measure", "name", "value"])
            for k, v in self.values.items():
                w.writerow([self.measure, k, repr(float(v))])
        paths[1].write_text(self.to_json() + "\n")
        for name, pts in self.curves.items():
            p = out / f"{stem}_{name}.csv"
            with p.open("w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["x", "y"])
                w.writerows((repr(float(x)), repr(float(y))) for x, y in pts)
            paths.append(p)
        return paths


def _json_float(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    raise TypeError(f"cannot serialize {type(x).__name__}")


# ---------------------------------------------------------------- test images


def philox(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by ``(seed, stream)``."""
    key = np.array([seed % 2**64, stream % 2**64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def uniform_open(gen: np.random.Generator, shape) -> np.ndarray:
    """Uniform variates on (0, 1) with 53-bit resolution, never 0 or 1."""
    return (gen.integers(0, 2**53, size=shape, dtype=np.uint64) + 0.5) / 2.0**53


def random_normal(n: int, seed: int, stream: int = 0) -> np.ndarray:
    return ndtri(uniform_open(philox(seed, stream), (n, n)))


def random_uniform(n: int, seed: int, stream: int = 0) -> np.ndarray:
    return uniform_open(philox(seed, stream), (n, n))


def random_pparray(params: PPGridParams, seed: int, stream: int = 0) -> PPArray:
    return PPArray(params, ndtri(uniform_open(philox(seed, stream), params.shape)).astype(complex))


def centered_coordinates(n: int) -> tuple[np.ndarray, np.ndarray]:
    c = np.arange(n) - n // 2
    return np.meshgrid(c.astype(float), c.astype(float), indexing="ij")


EDGE_TAPER = (0.25, 0.45)


def radial_taper(n: int, shear: float = 0.0, inner: float = EDGE_TAPER[0],
                 outer: float = EDGE_TAPER[1]) -> np.ndarray:
    """Smooth bump: 1 inside radius ``inner * n``, 0 beyond ``outer * n``.

    With ``shear`` the bump is composed with ``(u, v) -> (u + shear v, v)``.
    """
    u, v = centered_coordinates(n)
    t = (np.hypot(u + shear * v, v) / n - inner) / (outer - inner)
    return 1.0 - nu(t)


def edge_profile(t: np.ndarray, blur: float) -> np.ndarray:
    """Step across ``t = 0``: exact (1/2 on the line) or an erf ramp of width ``blur`` pixels."""
    if blur == 0:
        return np.where(t > 0, 1.0, np.where(t < 0, 0.0, 0.5))
    return 0.5 * (1.0 + erf(t / (math.sqrt(2.0) * blur)))


def edge_image(n: int, slope: float = 0.0, transpose: bool = False, taper: bool = True,
               blur: float = 0.0, shear: float = 0.0) -> np.ndarray:
    """Edge along ``u + slope v = 0`` through the center pixel.

    ``blur`` is the width of the erf ramp across the edge (0 gives a hard
    step).  ``taper`` multiplies by :func:`radial_taper`, so the periodic
    extension has no discontinuities besides the edge itself.  ``shear``
    composes the whole picture, taper included, with ``(u, v) -> (u + shear v, v)``.
    """
    u, v = centered_coordinates(n)
    img = edge_profile(u + (slope + shear) * v, blur)
    if taper:
        img = img * radial_taper(n, shear)
    return img.T.copy() if transpose else img


def gaussian_image(n: int, variance: float) -> np.ndarray:
    u, v = centered_coordinates(n)
    return np.exp(-(u**2 + v**2) / (2.0 * variance))


def test_image(kind: str, n: int, seed: int = 0, stream: int = 0, **kw) -> np.ndarray:
    if kind == "random-normal":
        return random_normal(n, seed, stream)
    if kind == "random-uniform":
        return random_uniform(n, seed, stream)
    if kind == "edge":
        return edge_image(n, kw.get("slope", 0.0), kw.get("transpose", False),
                          kw.get("taper", True), kw.get("blur", 0.0))
    if kind == "gaussian":
        return gaussian_image(n, kw.get("variance", 256.0))
    raise ValueError(f"unknown test image {kind!r}")


EDGE_SUITE = [(-1.0, False), (-0.5, False), (0.0, False), (0.5, False), (1.0, False),
              (-0.5, True), (0.0, True), (0.5, True)]


# ---------------------------------------------------------------- transforms


class Transform:
    """Contract used by the measures."""

    name = "abstract"
    exact_inverse = False

    def __init__(self, n: int):
        self.n = n

    def forward(self, img):
        raise NotImplementedError

    def adjoint(self, coeffs) -> np.ndarray:
        raise NotImplementedError

    def inverse(self, coeffs) -> np.ndarray:
        raise NotImplementedError

    def vector(self, coeffs) -> np.ndarray:
        raise NotImplementedError

    def from_vector(self, like, vec):
        raise NotImplementedError

    def bands(self, coeffs):
        """Yield ``((group, j, k), array)`` for every directional band."""
        raise NotImplementedError

    def scales(self) -> list[int]:
        raise NotImplementedError

    def shear_density(self, j: int) -> int:
        raise NotImplementedError

    def element_image(self, j: int) -> np.ndarray:
        """Picture of the slope-0 element of scale ``j`` at the image center."""
        raise NotImplementedError

    def aligned(self, key, slope: float, transpose: bool) -> bool:
        """Whether element ``key`` follows the edge ``u + slope v = 0`` (or its transpose).

        In the other group the same line has slope ``1 / slope``, which only
        matters on the cone boundary ``|slope| = 1``.
        """
        group, j, k = key
        own = slope if group == int(transpose) else (1.0 / slope if slope else math.inf)
        return abs(k + self.shear_density(j) * own) <= 1


class FdstTransform(Transform):
    name = "fdst"

    def __init__(self, n: int, r: int = 8, choice: int = 1, tol: float = 1e-6):
        super().__init__(n)
        params = PPGridParams(n, r)
        w = unit_weights(params) if choice == 0 else weights_for(params, choice)
        self.plan = FdstPlan.create(n, r, weights=w)
        self.tol = tol

    def forward(self, img):
        return fdst_forward(img, self.plan)

    def adjoint(self, coeffs):
        return fdst_adjoint(coeffs, self.plan).real

    def inverse(self, coeffs):
        return fdst_inverse_cg(coeffs, self.plan, tol=self.tol, maxiter=500).image

    def vector(self, coeffs):
        return coeffs.to_vector()

    def from_vector(self, like, vec):
        return FDSTCoeffs.from_vector(like.layout, vec)

    def bands(self, coeffs):
        # sector 2 (cones 21, 22) carries the radial variable on axis 0
        for (cone, j, k), arr in coeffs.bands.items():
            if j >= 0:
                yield (0 if cone // 10 == 2 else 1, j, k), arr

    def relative_band(self, coeffs, key) -> np.ndarray:
        """Band coefficients with the absolute-index phase removed."""
        b = self.plan.layout.band(*key)
        ph1 = np.exp(-2j * np.pi * np.arange(b.l1) * (b.n_lo % b.l1) / b.l1)
        ph2 = np.exp(-2j * np.pi * np.arange(b.l2) * (b.l_lo % b.l2) / b.l2)
        return coeffs.bands[key] / (ph1[:, None] * ph2[None, :])

    def scales(self):
        return list(range(0, self.plan.layout.j_high + 1))

    def shear_density(self, j):
        return 2**j

    def element_image(self, j):
        img = sum(fdst_adjoint(one_hot(self.plan, cone, j, 0), self.plan) for cone in (21, 22))
        return img.real


class DsstTransform(Transform):
    name = "dsst"

    def __init__(self, n: int, scales: int, c1: float = 1.0, c2: float = 1.0, tol: float = 1e-10):
        super().__init__(n)
        self.plan = _dsst.DsstPlan(n, scales, c1, c2)
        self.tol = tol

    def forward(self, img):
        return _dsst.dsst_forward(img, self.plan)

    def adjoint(self, coeffs):
        return _dsst.dsst_adjoint(coeffs, self.plan)

    def inverse(self, coeffs):
        return _dsst.dsst_inverse_cg(coeffs, self.plan, tol=self.tol).image

    def vector(self, coeffs):
        return coeffs.to_vector()

    def from_vector(self, like, vec):
        return like.like(vec)

    def bands(self, coeffs):
        for (cone, j, k), arr in coeffs.bands.items():
            yield (cone - 1, j, k), arr

    def scales(self):
        return list(range(self.plan.scales))

    def shear_density(self, j):
        return 2 ** math.ceil(j / 2)

    def element_image(self, j):
        c = _dsst.dsst_forward(np.zeros((self.n, self.n)), self.plan)
        band = c.bands[(1, j, 0)]
        band[band.shape[0] // 2, band.shape[1] // 2] = 1.0
        return _dsst.dsst_adjoint(c, self.plan)


class DnstTransform(Transform):
    name = "dnst"
    exact_inverse = True

    def __init__(self, n: int, scales: int):
        super().__init__(n)
        self.bank = _dnst.dnst_filters(scales, n)

    def forward(self, img):
        return _dnst.dnst_forward(img, self.bank)

    def adjoint(self, coeffs):
        return _dnst.dnst_adjoint(coeffs, self.bank)

    def inverse(self, coeffs):
        return _dnst.dnst_reconstruct(coeffs, self.bank)

    def vector(self, coeffs):
        return coeffs.to_vector()

    def from_vector(self, like, vec):
        return like.like(vec)

    def bands(self, coeffs):
        for (cone, j, k), arr in coeffs.bands.items():
            yield (cone - 1, j, k), arr

    def scales(self):
        return list(range(self.bank.scales))

    def shear_density(self, j):
        return 2 ** math.ceil(j / 2)

    def element_image(self, j):
        return self.bank.taps((1, j, 0))


class WaveletTransform(Transform):
    """Periodic separable orthonormal wavelet transform, used to check the harness."""

    name = "wavelet"
    exact_inverse = True

    def __init__(self, n: int, scales: int, pair: _dsst.FilterPair | None = None):
        super().__init__(n)
        self.levels = scales
        pair = pair or _dsst.FilterPair.maxflat(4)
        self.h = {}
        self.g = {}
        m = n
        for _ in range(scales):
            self.h[m] = pair.h.dft(m)
            self.g[m] = pair.g.dft(m)
            m //= 2

    def _split(self, x, axis):
        m = x.shape[axis]
        f = sfft.fft(x, axis=axis)
        shape = [1, 1]
        shape[axis] = m
        lo = sfft.ifft(f * np.conj(self.h[m]).reshape(shape), axis=axis).real
        hi = sfft.ifft(f * np.conj(self.g[m]).reshape(shape), axis=axis).real
        sl = [slice(None)] * 2
        sl[axis] = slice(None, None, 2)
        return lo[tuple(sl)], hi[tuple(sl)]

    def _merge(self, lo, hi, axis):
        m = 2 * lo.shape[axis]
        shape = [1, 1]
        shape[axis] = m
        up_lo = np.zeros(tuple(m if a == axis else lo.shape[a] for a in range(2)))
        up_hi = np.zeros_like(up_lo)
        sl = [slice(None)] * 2
        sl[axis] = slice(None, None, 2)
        up_lo[tuple(sl)] = lo
        up_hi[tuple(sl)] = hi
        f = (sfft.fft(up_lo, axis=axis) * self.h[m].reshape(shape)
             + sfft.fft(up_hi, axis=axis) * self.g[m].reshape(shape))
        return sfft.ifft(f, axis=axis).real

    def forward(self, img):
        x = np.asarray(img, dtype=float)
        bands = {}
        for lev in range(self.levels):
            lo, hi = self._split(x, 0)
            ll, lh = self._split(lo, 1)
            hl, hh = self._split(hi, 1)
            j = self.levels - 1 - lev
            bands[(0, j, 0)] = hl
            bands[(1, j, 0)] = lh
            bands[(2, j, 0)] = hh
            x = ll
        return _dnst.DNSTCoeffs(bands, x)

    def adjoint(self, coeffs):
        x = coeffs.low
        for j in range(self.levels):
            lo = self._merge(x, coeffs.bands[(1, j, 0)], 1)
            hi = self._merge(coeffs.bands[(0, j, 0)], coeffs.bands[(2, j, 0)], 1)
            x = self._merge(lo, hi, 0)
        return x

    inverse = adjoint

    def vector(self, coeffs):
        return coeffs.to_vector()

    def from_vector(self, like, vec):
        return like.like(vec)

    def bands(self, coeffs):
        yield from coeffs.bands.items()

    def scales(self):
        return list(range(self.levels))

    def shear_density(self, j):
        return 2 ** math.ceil(j / 2)

    def aligned(self, key, slope, transpose):
        group, j, k = key
        return group == int(transpose) and abs(slope) <= 0.5

    def element_image(self, j):
        c = self.forward(np.zeros((self.n, self.n)))
        band = c.bands[(0, j, 0)]
        band[band.shape[0] // 2, band.shape[1] // 2] = 1.0
        return self.adjoint(c)


@lru_cache(maxsize=16)
def _cached_transform(transform: str, n: int, r: int, choice: int, scales: int, c1: float,
                      c2: float) -> Transform:
    if transform == "fdst":
        return FdstTransform(n, r, choice)
    if transform == "dsst":
        return DsstTransform(n, scales, c1, c2)
    if transform == "dnst":
        return DnstTransform(n, scales)
    return WaveletTransform(n, scales)


def make_transform(cfg: MeasureConfig, size: int | None = None) -> Transform:
    n = size or cfg.size
    scales = cfg.resolved_scales if size is None else min(cfg.resolved_scales, int(math.log2(n)) - 2)
    return _cached_transform(cfg.transform, n, cfg.oversampling, cfg.weights, scales, cfg.c1, cfg.c2)


# ---------------------------------------------------------------- helpers


def relative_error(a, b) -> float:
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)) / np.linalg.norm(b))


def ls_slope(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xc = x - x.mean()
    return float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))


def decay_rate(series) -> float:
    """Least-squares slope of the log of the smallest nonincreasing majorant.

    Returns ``-inf`` when the majorant reaches zero, meaning values at or
    below ``1e-15`` times the series maximum.
    """
    a = np.abs(np.asarray(series, dtype=float))
    if a.size == 0:
        raise ValueError("empty series")
    if a.size == 1:
        return 0.0
    top = a.max()
    if top == 0:
        return -math.inf
    major = np.maximum.accumulate(a[::-1])[::-1]
    if major[-1] <= DECAY_FLOOR * top:
        return -math.inf
    return ls_slope(np.arange(a.size), np.log(np.maximum(major, 1e-300)))


def line_decay_rates(img: np.ndarray) -> np.ndarray:
    """Rates along every column from the center row down, then every row from the center column right."""
    n = img.shape[0]
    c = n // 2
    cols = [decay_rate(img[c:, b]) for b in range(n)]
    rows = [decay_rate(img[a, c:]) for a in range(n)]
    return np.array(cols + rows)


def _mean_rate(rates: np.ndarray) -> float:
    return float(np.mean(rates))


def _finish(report: MeasureReport, cfg: MeasureConfig, t0: float) -> MeasureReport:
    report.values = {k: float(v) for k, v in report.values.items()}
    report.curves = {k: [(float(x), float(y)) for x, y in pts] for k, pts in report.curves.items()}
    report.config = asdict(cfg)
    report.config["scales"] = cfg.resolved_scales
    report.runtime = time.perf_counter() - t0
    return report


def _require(cfg: MeasureConfig, allowed: tuple[str, ...], measure: int):
    if cfg.transform not in allowed:
        raise ValueError(f"measure {measure} applies to {', '.join(allowed)} only")


# ---------------------------------------------------------------- measures


def m1_algebraic_exactness(cfg: MeasureConfig, synthesis_scale: float = 1.0) -> MeasureReport:
    """Monte Carlo estimate of the windowing defect on random grid arrays."""
    _require(cfg, ("fdst",), 1)
    t0 = time.perf_counter()
    tr = make_transform(cfg)
    win = tr.plan.windows
    worst = 0.0
    for i in range(cfg.trials):
        a = random_pparray(tr.plan.params, cfg.seed, i)
        back = win.adjoint(win.apply(a)) * synthesis_scale
        worst = max(worst, (back - a).norm() / a.norm())
    return _finish(MeasureReport(1, "algebraic exactness", {"M_alg": worst}), cfg, t0)


def m2_isometry(cfg: MeasureConfig) -> MeasureReport:
    _require(cfg, ("fdst",), 2)
    t0 = time.perf_counter()
    tr = make_transform(cfg)
    plan = tr.plan
    isom1 = isom3 = 0.0
    for i in range(cfg.trials):
        img = random_uniform(cfg.size, cfg.seed, i)
        g = gram(img, plan)
        isom1 = max(isom1, relative_error(g.real, img))
        res = conjugate_gradient(lambda x: gram(x, plan), g, tol=1e-6, maxiter=500)
        isom3 = max(isom3, relative_error(res.image.real, img))
    _, _, cond = gram_condition(plan.weights, plan.ppft)
    values = {"M_isom1": isom1, "M_isom2": cond, "M_isom3": isom3}
    return _finish(MeasureReport(2, "isometry of the pseudo-polar transform", values), cfg, t0)


def m3_parseval(cfg: MeasureConfig) -> MeasureReport:
    t0 = time.perf_counter()
    tr = make_transform(cfg)
    tight1 = tight2 = 0.0
    for i in range(cfg.trials):
        img = random_uniform(cfg.size, cfg.seed, i)
        c = tr.forward(img)
        tight1 = max(tight1, relative_error(tr.adjoint(c), img))
        tight2 = max(tight2, relative_error(tr.inverse(c), img))
    notes = {"reconstruction": "dual filters" if tr.exact_inverse and tr.name == "dnst"
             else "exact inverse" if tr.exact_inverse else f"conjugate gradients, tol {tr.tol:g}"}
    return _finish(MeasureReport(3, "Parseval frame property",
                                 {"M_tight1": tight1, "M_tight2": tight2}, notes=notes), cfg, t0)


def spacefreq_values(img: np.ndarray, radius: int = 4) -> dict[str, float]:
    """The five localization numbers of one analyzing-element picture."""
    spec = sfft.fftshift(sfft.fft2(sfft.ifftshift(img)))
    mag = np.abs(spec)
    c = img.shape[0] // 2
    supp = mag[c - 3:c + 4, c - 3:c + 4].max() / mag.max()
    smooth1 = float(np.nanmean(kernels.holder_exponents(img, radius)))
    smooth2 = float(np.nanmean(kernels.holder_exponents(mag, radius)))
    return {
        "M_decay1": _mean_rate(line_decay_rates(img)),
        "M_supp": float(supp),
        "M_decay2": _mean_rate(line_decay_rates(mag)),
        "M_smooth1": smooth1,
        "M_smooth2": smooth2,
    }


def m4_spacefreq(cfg: MeasureConfig, image: np.ndarray | None = None) -> MeasureReport:
    """Localization of the scale-4 (or finest available) slope-0 element."""
    if cfg.size < 64:
        raise ValueError("measure 4 needs size >= 64")
    t0 = time.perf_counter()
    notes = {"decay2_divisor": "mean over computed rates"}
    if image is None:
        tr = make_transform(cfg)
        j = min(4, max(tr.scales()))
        image = tr.element_image(j)
        notes["scale"] = str(j)
    values = spacefreq_values(np.asarray(image, dtype=float))
    return _finish(MeasureReport(4, "space-frequency localization", values, notes=notes), cfg, t0)


def m5_shear_invariance(cfg: MeasureConfig, shears: tuple[float, ...] = (-0.5, 0.5),
                        scales: tuple[int, ...] = (1, 2, 3, 4), blur: float = 0.5) -> MeasureReport:
    """Distance between bands of a sheared edge and shifted bands of the edge.

    The edge has an erf ramp of ``blur`` pixels so that shearing the sampled
    picture agrees with sampling the sheared picture; a hard step adds
    aliasing that dominates at fine scales.  Bands are compared without the
    absolute-index phase, since the shear moves the band rectangle.
    """
    _require(cfg, ("fdst",), 5)
    t0 = time.perf_counter()
    tr = make_transform(cfg)
    img = edge_image(cfg.size, 0.0, blur=blur)
    base = tr.forward(img)
    norm = np.linalg.norm(img)
    avail = set(tr.scales())
    worst = {j: 0.0 for j in scales if j in avail}
    for s in shears:
        sheared = tr.forward(edge_image(cfg.size, 0.0, blur=blur, shear=s))
        for j in worst:
            shift = 2**j * s
            if shift != int(shift):
                continue
            shift = int(shift)
            for cone in (21, 22):
                for k in range(-(2**j) + 1, 2**j):
                    if not -(2**j) < k + shift < 2**j:
                        continue
                    a = tr.relative_band(sheared, (cone, j, k))
                    b = tr.relative_band(base, (cone, j, k + shift))
                    worst[j] = max(worst[j], float(np.linalg.norm(a - b)) / norm)
    curve = [(float(j), v) for j, v in worst.items()]
    values = {f"M_shear_{j}": v for j, v in worst.items()}
    notes = {"shears": ",".join(str(s) for s in shears), "edge_blur": f"{blur:g}"}
    return _finish(MeasureReport(5, "shear invariance", values, {"M_shear": curve}, notes), cfg, t0)


def _timed(fn, repeats: int = 3, min_time: float = 0.02) -> float:
    """Median over ``repeats`` of the mean time of enough calls to exceed ``min_time``."""
    fn()
    calls = 1
    while True:
        t = time.perf_counter()
        for _ in range(calls):
            fn()
        if time.perf_counter() - t >= min_time or calls >= 1024:
            break
        calls *= 2
    samples = []
    for _ in range(repeats):
        t = time.perf_counter()
        for _ in range(calls):
            fn()
        samples.append((time.perf_counter() - t) / calls)
    return float(np.median(samples))


def m6_speed(cfg: MeasureConfig, exponents: tuple[int, ...] | None = None) -> MeasureReport:
    """Forward-transform timings against image size and the 2D FFT.

    FDST plans use unit weights here: the weight values do not change the
    work done, and fitting them at the largest sizes dominates otherwise.
    """
    t0 = time.perf_counter()
    if exponents is None:
        exponents = (7, 8, 9) if cfg.transform == "dnst" else (5, 6, 7, 8, 9)
    times, ffts = [], []
    for i in exponents:
        n = 2**i
        img = random_normal(n, cfg.seed, i)
        if cfg.transform == "fdst":
            tr = FdstTransform.__new__(FdstTransform)
            Transform.__init__(tr, n)
            params = PPGridParams(n, cfg.oversampling)
            tr.plan = FdstPlan.create(n, cfg.oversampling, weights=unit_weights(params))
        else:
            tr = make_transform(cfg, n)
        times.append(_timed(lambda: tr.forward(img)))
        ffts.append(_timed(lambda: np.fft.fft2(img)))
    slope = ls_slope(exponents, np.log(times))
    d = slope / (2 * math.log(2))
    values = {
        "M_speed1": d,
        "M_speed2": float(np.mean([s / (4.0**i) ** d for s, i in zip(times, exponents)])),
        "M_speed3": float(np.mean(np.array(times) / np.array(ffts))),
    }
    curves = {"seconds": list(zip(map(float, exponents), times)),
              "fft_seconds": list(zip(map(float, exponents), ffts))}
    rep = MeasureReport(6, "speed", values, curves, {"statistic": "median of 3"})
    rep.timing_keys = ("M_speed1", "M_speed2", "M_speed3", "seconds", "fft_seconds")
    return _finish(rep, cfg, t0)


def geometric_curves(tr: Transform, suite=EDGE_SUITE) -> tuple[list[int], np.ndarray, np.ndarray]:
    """Per scale, suite-averaged max magnitudes of aligned and of all other elements."""
    scales = tr.scales()
    sig = np.zeros(len(scales))
    ins = np.zeros(len(scales))
    for slope, transpose in suite:
        c = tr.forward(edge_image(tr.n, slope, transpose))
        best_a = dict.fromkeys(scales, 0.0)
        best_o = dict.fromkeys(scales, 0.0)
        for key, arr in tr.bands(c):
            j = key[1]
            if j not in best_a:
                continue
            m = float(np.abs(arr).max())
            target = best_a if tr.aligned(key, slope, transpose) else best_o
            target[j] = max(target[j], m)
        sig += np.array([best_a[j] for j in scales])
        ins += np.array([best_o[j] for j in scales])
    return scales, sig / len(suite), ins / len(suite)


def m7_geometric(cfg: MeasureConfig) -> MeasureReport:
    """Decay over scales of significant and insignificant edge coefficients (log base 2)."""
    t0 = time.perf_counter()
    tr = make_transform(cfg)
    scales, sig, ins = geometric_curves(tr)
    values = {"M_geo1": ls_slope(scales, np.log2(sig)), "M_geo2": ls_slope(scales, np.log2(ins))}
    curves = {"significant": list(zip(map(float, scales), sig.tolist())),
              "insignificant": list(zip(map(float, scales), ins.tolist()))}
    notes = {"log": "base 2 per scale index",
             "alignment": "|k + shear_density(j) * slope| <= 1 in the matching cone"}
    return _finish(MeasureReport(7, "geometric exactness", values, curves, notes), cfg, t0)


def keep_largest(vec: np.ndarray, fraction: float) -> np.ndarray:
    """Zero all but the ``ceil(fraction * size)`` largest magnitudes (stable ties)."""
    count = max(1, math.ceil(fraction * vec.size))
    order = np.argsort(-np.abs(vec), kind="stable")
    out = np.zeros_like(vec)
    out[order[:count]] = vec[order[:count]]
    return out


def hard_threshold(vec: np.ndarray, p2: float) -> np.ndarray:
    m = np.abs(vec).max()
    return np.where(np.abs(vec) >= m * (1 - 2.0**-p2), vec, 0)


def m8_stability(cfg: MeasureConfig, p1s=(2, 4, 6, 8, 10),
                 p2s=(0.001, 0.011, 0.021, 0.031, 0.041), variance: float = 256.0) -> MeasureReport:
    t0 = time.perf_counter()
    tr = make_transform(cfg)
    img = gaussian_image(cfg.size, variance)
    c = tr.forward(img)
    vec = tr.vector(c)
    curve1, curve2 = [], []
    for p in p1s:
        rec = tr.inverse(tr.from_vector(c, keep_largest(vec, 2.0**-p)))
        curve1.append((float(p), relative_error(rec, img)))
    for p in p2s:
        rec = tr.inverse(tr.from_vector(c, hard_threshold(vec, p)))
        curve2.append((float(p), relative_error(rec, img)))
    values = {f"thres1_p{p:g}": e for p, e in curve1}
    values.update({f"thres2_p{p:g}": e for p, e in curve2})
    return _finish(MeasureReport(8, "stability under thresholding", values,
                                 {"thres1": curve1, "thres2": curve2}), cfg, t0)


MEASURES = {
    1: m1_algebraic_exactness,
    2: m2_isometry,
    3: m3_parseval,
    4: m4_spacefreq,
    5: m5_shear_invariance,
    6: m6_speed,
    7: m7_geometric,
    8: m8_stability,
}

APPLICABLE = {1: ("fdst",), 2: ("fdst",), 5: ("fdst",)}


def run_measure(measure: int, cfg: MeasureConfig) -> MeasureReport:
    if measure not in MEASURES:
        raise ValueError(f"unknown measure {measure}")
    return MEASURES[measure](cfg)


def run_all(cfg: MeasureConfig) -> list[MeasureReport]:
    """Every measure that applies to the configured transform."""
    return [fn(cfg) for mid, fn in MEASURES.items()
            if cfg.transform in APPLICABLE.get(mid, TRANSFORMS)]
