"""Density-compensation weights on the pseudo-polar grid.

A weight function ``w`` is a function of grid *points*: every stored copy of a
repeated point (seam or center) carries the same value.  The Gram operator is

    G = P^H diag(w / mult) P = sum over distinct points of w(p) e_p e_p^H,

where ``mult`` counts the stored copies of each point.  The weights are fitted
so that ``G`` is close to the identity in Frobenius norm.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import nnls
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from .core import NumericalError, PPArray, PPGridParams, grid_multiplicity
from .ppft import PpftPlan, ppft_adjoint, ppft_fast


@dataclass(frozen=True)
class WeightBasis:
    """Point functions ``w_1..w_n0`` stored on the full ``params.shape`` grid."""

    params: PPGridParams
    choice: int
    tables: tuple[np.ndarray, ...] = field(repr=False)

    def __len__(self) -> int:
        return len(self.tables)


def _abs_indices(params: PPGridParams) -> tuple[np.ndarray, np.ndarray]:
    n = np.broadcast_to(np.abs(params.radial_indices)[:, None], params.sector_shape)
    l = np.broadcast_to(np.abs(params.slope_indices)[None, :], params.sector_shape)
    return np.stack([n, n]), np.stack([l, l])


def basis_choice1(params: PPGridParams) -> WeightBasis:
    """Center, boundary seam, boundary, seam and interior classes."""
    n, l = _abs_indices(params)
    center = n == 0
    seam = (l == params.n // 2) & ~center
    bound = n == params.rn // 2
    tables = (
        center * 1.0,
        (bound & seam) * 1.0,
        (bound & ~seam) * 1.0,
        n * (seam & ~bound),
        n * (~seam & ~bound & ~center),
    )
    return WeightBasis(params, 1, tuple(t.astype(float) for t in tables))


def basis_choice2(params: PPGridParams) -> WeightBasis:
    """Center plus one radially linear function per slope line ``|l| = 0..N/2``.

    The rings ``|n| = 1`` and ``|n| = RN/2`` are included in the line they lie
    on, so the basis covers every grid point.
    """
    n, l = _abs_indices(params)
    center = n == 0
    tables = [center * 1.0]
    for line in range(params.n // 2 + 1):
        tables.append(n * ((l == line) & ~center))
    return WeightBasis(params, 2, tuple(t.astype(float) for t in tables))


def basis_constant(params: PPGridParams) -> WeightBasis:
    """A single constant function (choice 0); useful as a baseline."""
    return WeightBasis(params, 0, (np.ones(params.shape),))


def make_basis(params: PPGridParams, choice: int) -> WeightBasis:
    builders = {0: basis_constant, 1: basis_choice1, 2: basis_choice2}
    if choice not in builders:
        raise ValueError(f"unknown weight choice {choice}")
    return builders[choice](params)


@dataclass(frozen=True)
class WeightTable:
    """Fitted weights: point values on every stored index plus the fit record."""

    params: PPGridParams
    choice: int
    coefficients: np.ndarray
    values: np.ndarray = field(repr=False)
    residual_rms: float = float("nan")
    residual_max: float = float("nan")

    @property
    def absorbed(self) -> np.ndarray:
        """Per-stored-index weights ``w / mult`` for the plain stored-index adjoint."""
        return self.values / grid_multiplicity(self.params)


def unit_weights(params: PPGridParams) -> WeightTable:
    return WeightTable(params, 0, np.ones(1), np.ones(params.shape))


def _equation_matrix(basis: WeightBasis) -> np.ndarray:
    """``T[j, u, v]`` = sum over distinct points of ``w_j(p) cos(2 pi u x_p) cos(2 pi v y_p)``.

    Here ``(x_p, y_p)`` are the grid coordinates divided by ``m0`` and
    ``u, v = 0..N-1``; these are the entries ``G(d)`` of the Gram matrix at
    lag ``d = (u, v)`` once the sine parts cancel by symmetry.
    """
    p = basis.params
    nn = p.n
    u = np.arange(nn)
    radial = p.radial_indices
    slope = p.slope_indices
    b = np.stack(basis.tables) / grid_multiplicity(p)
    cu = np.cos(2 * np.pi * np.outer(radial / (p.rn + 1), u))
    s1 = np.empty((radial.size, len(basis), nn))
    s2 = np.empty_like(s1)
    for i, n in enumerate(radial):
        # tilted coordinate of line l at radius n, times v
        cv = np.cos(2 * np.pi * np.outer(slope, u) * (-2.0 * n / (nn * (p.rn + 1))))
        s1[i] = b[:, 0, i, :] @ cv
        s2[i] = b[:, 1, i, :] @ cv
    # sector 2: straight axis pairs with u; sector 1: straight axis pairs with v
    t = np.einsum("nu,njv->juv", cu, s2) + np.einsum("nju,nv->juv", s1, cu)
    return t


def _equation_weights(nn: int, mode: str) -> np.ndarray:
    u = np.arange(nn)
    fold = (2.0 - (u == 0))
    if mode == "uniform":
        return np.outer(fold, fold)
    if mode == "frobenius":
        return np.outer(fold * (nn - u), fold * (nn - u))
    raise ValueError(f"unknown equation weighting {mode!r}")


def fit_weights(
    basis: WeightBasis,
    equations: str = "frobenius",
    nonnegative: bool = True,
) -> WeightTable:
    """Least-squares fit of ``w = sum c_j w_j`` to the Plancherel condition ``G = Id``.

    ``equations="frobenius"`` weights each lag by the number of Gram entries
    it occupies, so the fit minimizes ``||G - Id||_F``; ``"uniform"`` counts
    each of the ``(2N-1)^2`` lag equations once.  With ``nonnegative`` the
    coefficients are constrained to ``c >= 0``; otherwise a plain solve is
    used and a negative weight raises.
    """
    p = basis.params
    t = _equation_matrix(basis).reshape(len(basis), -1).T
    rhs = np.zeros(p.n * p.n)
    rhs[0] = 1.0
    sw = np.sqrt(_equation_weights(p.n, equations)).ravel()
    a = t * sw[:, None]
    scale = np.linalg.norm(a, axis=0)
    if np.any(scale == 0):
        raise NumericalError("a basis function does not enter any equation")
    if nonnegative:
        c, _ = nnls(a / scale, rhs * sw, maxiter=50 * len(basis))
    else:
        c, _, rank, _ = np.linalg.lstsq(a / scale, rhs * sw, rcond=None)
        if rank < len(basis):
            raise NumericalError("singular weight equations")
    c = c / scale
    values = sum(ci * tab for ci, tab in zip(c, basis.tables))
    if np.any(values < 0):
        raise NumericalError(f"fitted weights are negative; coefficients {c}")
    if not np.any(values > 0):
        raise NumericalError("fitted weights vanish identically")
    res = (t @ c - rhs).reshape(p.n, p.n)
    count = _equation_weights(p.n, "uniform")
    rms = float(np.sqrt(np.sum(count * res**2) / count.sum()))
    return WeightTable(p, basis.choice, c, values, rms, float(np.abs(res).max()))


def apply_weights(a: PPArray, w: WeightTable, mode: str = "sqrt") -> PPArray:
    """Pointwise multiplication by ``sqrt(w)`` or ``w``."""
    if a.params != w.params:
        raise ValueError("array and weights use different grids")
    if mode == "sqrt":
        return a * np.sqrt(w.values)
    if mode == "full":
        return a * w.values
    raise ValueError(f"unknown weighting mode {mode!r}")


def gram_apply(img: np.ndarray, w: WeightTable, plan: PpftPlan) -> np.ndarray:
    """``G img`` with ``G = P^H diag(w / mult) P``."""
    return ppft_adjoint(ppft_fast(img, plan) * w.absorbed, plan)


def gram_operator(w: WeightTable, plan: PpftPlan) -> LinearOperator:
    """``G`` as a real symmetric operator on flattened real images."""
    nn = w.params.n
    absorbed = w.absorbed

    def matvec(x):
        img = np.asarray(x, dtype=float).reshape(nn, nn)
        return ppft_adjoint(ppft_fast(img, plan) * absorbed, plan).real.ravel()

    return LinearOperator((nn * nn, nn * nn), matvec=matvec, dtype=float)


def gram_condition(
    w: WeightTable,
    plan: PpftPlan | None = None,
    tol: float = 1e-6,
    maxiter: int = 500,
) -> tuple[float, float, float]:
    """Extreme eigenvalues of ``G`` by Lanczos iteration and their ratio."""
    plan = plan or PpftPlan(w.params)
    op = gram_operator(w, plan)
    v0 = np.ones(op.shape[0])
    try:
        lmax = eigsh(op, k=1, which="LA", tol=tol, maxiter=maxiter, v0=v0,
                     return_eigenvectors=False)[0]
        lmin = eigsh(op, k=1, which="SA", tol=tol, maxiter=maxiter, v0=v0,
                     return_eigenvectors=False)[0]
    except ArpackNoConvergence as exc:
        raise NumericalError(f"eigenvalue iteration did not converge: {exc}") from exc
    if lmin <= 0:
        raise NumericalError(f"Gram operator is not positive definite (lambda_min={lmin})")
    return float(lmax), float(lmin), float(lmax / lmin)


# weight cache files

_SHWT_MAGIC = b"SHWT"
_SHWT_VERSION = 1
_SHWT_HEADER = struct.Struct("<4sHIIBH")


def save_weights(w: WeightTable, path) -> None:
    p = w.params
    header = _SHWT_HEADER.pack(_SHWT_MAGIC, _SHWT_VERSION, p.n, p.r, w.choice,
                               len(w.coefficients))
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.asarray(w.coefficients, dtype="<f8").tobytes())
        fh.write(np.asarray(w.values, dtype="<f8").tobytes())


def load_weights(path) -> WeightTable:
    raw = Path(path).read_bytes()
    if len(raw) < _SHWT_HEADER.size:
        raise ValueError("weight file truncated")
    magic, version, n, r, choice, n0 = _SHWT_HEADER.unpack_from(raw)
    if magic != _SHWT_MAGIC:
        raise ValueError("not a weight file")
    if version != _SHWT_VERSION:
        raise ValueError(f"unsupported weight file version {version}")
    params = PPGridParams(n, r)
    off = _SHWT_HEADER.size
    need = off + 8 * n0 + 8 * int(np.prod(params.shape))
    if len(raw) != need:
        raise ValueError(f"weight file has {len(raw)} bytes, expected {need}")
    coef = np.frombuffer(raw, "<f8", n0, off).astype(float)
    vals = np.frombuffer(raw, "<f8", offset=off + 8 * n0).astype(float).reshape(params.shape)
    return WeightTable(params, choice, coef, vals)


def cache_dir() -> Path:
    root = os.environ.get("DIGISHEAR_CACHE")
    if root:
        return Path(root)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "digishear"


def weights_for(params: PPGridParams, choice: int = 1, use_cache: bool = True) -> WeightTable:
    """Fitted weights for ``params``, read from or written to the cache directory."""
    if choice == 0:
        return fit_weights(basis_constant(params))
    path = cache_dir() / f"w_n{params.n}_r{params.r}_c{choice}.shwt"
    if use_cache and path.exists():
        try:
            return load_weights(path)
        except ValueError:
            pass
    w = fit_weights(make_basis(params, choice))
    if use_cache:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            save_weights(w, path)
        except OSError:
            pass
    return w
