"""Fast digital shearlet transform: pseudo-polar FFT, weighting, windowing."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import CgResult, PPGridParams, check_image, conjugate_gradient
from .ppft import PpftPlan, ppft_adjoint, ppft_fast
from .weights import WeightTable, weights_for
from .windows import FDSTCoeffs, WindowPlan, WindowSpec, window_plan


@dataclass
class FdstPlan:
    params: PPGridParams
    ppft: PpftPlan
    weights: WeightTable
    windows: WindowPlan
    sqrt_w: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not (self.ppft.params == self.weights.params == self.windows.params == self.params):
            raise ValueError("sub-plans use different grids")
        self.sqrt_w = np.sqrt(self.weights.values)

    @classmethod
    def create(cls, n: int, r: int = 8, choice: int = 1, spec: WindowSpec | None = None,
               weights: WeightTable | None = None) -> FdstPlan:
        params = PPGridParams(n, r)
        w = weights if weights is not None else weights_for(params, choice)
        return cls(params, PpftPlan(params), w, window_plan(params, spec))

    @property
    def layout(self):
        return self.windows.layout


def fdst_forward(img, plan: FdstPlan) -> FDSTCoeffs:
    img = check_image(img, plan.params.n)
    return plan.windows.apply(ppft_fast(img, plan.ppft) * plan.sqrt_w)


def fdst_adjoint(c: FDSTCoeffs, plan: FdstPlan) -> np.ndarray:
    """Exact adjoint of :func:`fdst_forward` (complex image)."""
    grid = plan.windows.adjoint_stored(c)
    return ppft_adjoint(grid * plan.sqrt_w, plan.ppft)


def gram(img: np.ndarray, plan: FdstPlan) -> np.ndarray:
    """``P^H (w / mult) P img``, which equals ``fdst_adjoint(fdst_forward(img))``."""
    return ppft_adjoint(ppft_fast(img, plan.ppft) * plan.weights.absorbed, plan.ppft)


def fdst_inverse_cg(c: FDSTCoeffs, plan: FdstPlan, tol: float = 1e-6,
                    maxiter: int = 200) -> CgResult:
    """Weighted least-squares inverse by CG on ``G x = S^* c``.

    The returned image is the real part of the iterate; ``imag_norm`` reports
    the discarded imaginary part.
    """
    b = fdst_adjoint(c, plan)
    res = conjugate_gradient(lambda x: gram(x, plan), b, tol=tol, maxiter=maxiter)
    res.imag_norm = float(np.linalg.norm(res.image.imag))
    res.image = res.image.real
    return res


def one_hot(plan: FdstPlan, cone: int, j: int, k: int, m: tuple[int, int] = (0, 0)) -> FDSTCoeffs:
    c = FDSTCoeffs.zeros(plan.layout)
    c.bands[plan.layout.band(cone, j, k).key][m] = 1.0
    return c


def shearlet_image(plan: FdstPlan, cone: int, j: int, k: int, mode: str = "adjoint",
                   tol: float = 1e-8) -> np.ndarray:
    """Spatial picture of the shearlet ``(cone, j, k, m=0)``.

    ``mode="adjoint"`` applies :func:`fdst_adjoint` to the one-hot coefficient
    array; ``mode="cg"`` solves the weighted least-squares problem instead.
    """
    c = one_hot(plan, cone, j, k)
    if mode == "adjoint":
        return fdst_adjoint(c, plan)
    if mode == "cg":
        b = fdst_adjoint(c, plan)
        return conjugate_gradient(lambda x: gram(x, plan), b, tol=tol, maxiter=500).image
    raise ValueError(f"unknown mode {mode!r}")
