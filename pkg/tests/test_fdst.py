import numpy as np
import pytest

from digishear.core import PPGridParams
from digishear.fdst import (
    FdstPlan,
    fdst_adjoint,
    fdst_forward,
    fdst_inverse_cg,
    gram,
    one_hot,
    shearlet_image,
)
from digishear.ppft import ppft_fast
from digishear.weights import gram_condition
from digishear.windows import FDSTCoeffs


@pytest.fixture(scope="module")
def plan32():
    return FdstPlan.create(32)


@pytest.fixture(scope="module")
def plan64():
    return FdstPlan.create(64)


def test_zero_image_and_zero_coefficients(plan32):
    c = fdst_forward(np.zeros((32, 32)), plan32)
    assert not c.to_vector().any()
    assert not fdst_adjoint(FDSTCoeffs.zeros(plan32.layout), plan32).any()


def test_linearity(plan32, rng):
    x, y = rng.standard_normal((2, 32, 32))
    lhs = fdst_forward(2 * x - 3 * y, plan32).to_vector()
    rhs = 2 * fdst_forward(x, plan32).to_vector() - 3 * fdst_forward(y, plan32).to_vector()
    assert np.allclose(lhs, rhs, atol=1e-10)


def test_energy_equals_weighted_transform_energy(plan32, rng):
    x = rng.standard_normal((32, 32))
    c = fdst_forward(x, plan32)
    weighted = ppft_fast(x, plan32.ppft) * plan32.sqrt_w
    assert abs(c.norm() ** 2 - weighted.omega_norm() ** 2) <= 1e-12 * c.norm() ** 2
    assert np.isclose(c.norm() ** 2, np.vdot(x, gram(x, plan32)).real, rtol=1e-12)


def test_adjoint_identity(plan32, rng):
    lay = plan32.layout
    for _ in range(20):
        x = rng.standard_normal((32, 32))
        y = FDSTCoeffs.from_vector(lay, rng.standard_normal(lay.count) + 1j * rng.standard_normal(lay.count))
        lhs = np.vdot(y.to_vector(), fdst_forward(x, plan32).to_vector())
        rhs = np.vdot(fdst_adjoint(y, plan32), x)
        assert abs(lhs - rhs) <= 1e-12 * np.linalg.norm(x) * y.norm()


@pytest.mark.parametrize("n", [
    pytest.param(32, marks=pytest.mark.xfail(
        strict=True, reason="five-function weights leave about 5e-3 to 6e-3 at N=32")),
    64,
])
def test_adjoint_roundtrip_is_nearly_exact(n, rng, plan32, plan64):
    plan = plan32 if n == 32 else plan64
    x = rng.uniform(size=(n, n))
    back = fdst_adjoint(fdst_forward(x, plan), plan).real
    assert np.linalg.norm(back - x) / np.linalg.norm(x) <= 5e-3


def test_cg_inverse(plan64, rng):
    x = rng.uniform(size=(64, 64))
    c = fdst_forward(x, plan64)
    res = fdst_inverse_cg(c, plan64, tol=1e-6)
    assert res.converged
    assert np.linalg.norm(res.image - x) / np.linalg.norm(x) <= 1e-6
    assert res.iterations <= 25
    assert res.imag_norm <= 1e-6 * np.linalg.norm(x)
    loose = fdst_inverse_cg(c, plan64, tol=1e-1)
    assert loose.iterations < res.iterations
    assert loose.residuals[-1] > res.residuals[-1]


def test_element_energy_bounded_by_frame_constant(plan32):
    hi, _, _ = gram_condition(plan32.weights, plan32.ppft)
    for key in [(11, 0, 0), (21, 1, 2), (22, 2, -1)]:
        e = one_hot(plan32, *key)
        img = shearlet_image(plan32, *key)
        energy = np.linalg.norm(img) ** 2
        assert np.isclose(energy, np.vdot(e.to_vector(), fdst_forward(img, plan32).to_vector()).real)
        assert 0 < energy <= hi * 1.0001


def test_shearlet_image_modes(plan32):
    a = shearlet_image(plan32, 11, 1, 0, mode="adjoint")
    b = shearlet_image(plan32, 11, 1, 0, mode="cg")
    assert a.shape == b.shape == (32, 32)
    with pytest.raises(ValueError):
        shearlet_image(plan32, 11, 1, 0, mode="other")


@pytest.mark.slow
def test_fine_slope_zero_pair_is_real_and_concentrated():
    plan = FdstPlan.create(256)
    img = shearlet_image(plan, 11, 4, 0) + shearlet_image(plan, 12, 4, 0)
    assert np.abs(img.imag).max() <= 1e-10 * np.abs(img).max()
    e = np.abs(img) ** 2
    h = 256 // 16
    assert e[128 - h:128 + h].sum() / e.sum() > 0.5


def test_mismatched_subplans_rejected():
    a = FdstPlan.create(16, 4)
    b = FdstPlan.create(16, 2)
    with pytest.raises(ValueError):
        FdstPlan(a.params, b.ppft, a.weights, a.windows)
    assert a.params == PPGridParams(16, 4)
