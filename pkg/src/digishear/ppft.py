"""Pseudo-polar Fourier transform: fast algorithm, adjoint and direct oracle."""

from __future__ import annotations

import numpy as np

from .core import PPArray, PPGridParams, check_image, grid_multiplicity
from .frft import FrftPlan, centered_dft, centered_dft_adjoint


class PpftPlan:
    """Precomputed frFT chirps for every radial row ``n`` of a grid."""

    def __init__(self, params: PPGridParams):
        self.params = params
        n = params.radial_indices
        # alpha_n = -2n / ((RN+1) N)
        self.alphas = -2.0 * n / ((params.rn + 1) * params.n)
        self.forward_plan = FrftPlan(params.n + 1, self.alphas)
        self.adjoint_plan = FrftPlan(params.n + 1, -self.alphas)
        self.inv_multiplicity = 1.0 / grid_multiplicity(params)


def _sector_forward(img: np.ndarray, plan: PpftPlan) -> np.ndarray:
    p = plan.params
    # v direction: pad to RN+1 and take the unaliased DFT -> rows u, columns n
    y = centered_dft(img, p.rn + 1, axis=1)
    # u direction: pad to N+1 (one zero at u = N/2), then frFT per n
    z = np.zeros((p.rn + 1, p.n + 1), dtype=complex)
    z[:, : p.n] = y.T
    return plan.forward_plan.apply(z)


def _sector_adjoint(a: np.ndarray, plan: PpftPlan) -> np.ndarray:
    p = plan.params
    z = plan.adjoint_plan.apply(a)[:, : p.n]
    return centered_dft_adjoint(z.T, p.n, axis=1)


def ppft_fast(img, plan: PpftPlan) -> PPArray:
    """Pseudo-polar transform in O(R N^2 log N)."""
    img = check_image(img, plan.params.n)
    out = np.empty(plan.params.shape, dtype=complex)
    out[0] = _sector_forward(img, plan)
    out[1] = _sector_forward(img.T, plan)
    return PPArray(plan.params, out)


def ppft_adjoint(a: PPArray, plan: PpftPlan) -> np.ndarray:
    """Adjoint of :func:`ppft_fast` for the plain sum over stored indices."""
    if a.params != plan.params:
        raise ValueError("array and plan use different grids")
    return _sector_adjoint(a.data[0], plan) + _sector_adjoint(a.data[1], plan).T


def ppft_adjoint_omega(a: PPArray, plan: PpftPlan) -> np.ndarray:
    """Adjoint of :func:`ppft_fast` when the grid side uses the distinct-point inner product."""
    return ppft_adjoint(a * plan.inv_multiplicity, plan)


def ppft_direct(img, params: PPGridParams) -> PPArray:
    """Direct O(R N^4) evaluation of the pseudo-polar sums (reference oracle).

    With ``m0 = 2(RN+1)/R`` every phase is an integer over ``N (RN+1)``, so
    the argument is reduced exactly in integer arithmetic.
    """
    img = check_image(img, params.n)
    nn = params.n
    den = nn * (params.rn + 1)
    u = np.arange(nn) - nn // 2
    n = params.radial_indices
    l = params.slope_indices
    out = np.empty(params.shape, dtype=complex)
    for sector, im in ((0, img), (1, img.T)):
        # sector 1 phase numerator: -2 u n l + v n N  (u pairs with the tilted axis)
        tilt = (-2 * n[:, None, None] * l[None, :, None] * u[None, None, :]) % den
        straight = (n[:, None] * u[None, :] * nn) % den
        e_tilt = np.exp(-2j * np.pi * tilt / den)
        e_straight = np.exp(-2j * np.pi * straight / den)
        # sum over v first, then u
        partial = e_straight @ im.T.astype(complex)  # (n, u)
        out[sector] = np.einsum("nlu,nu->nl", e_tilt, partial)
    return PPArray(params, out)
