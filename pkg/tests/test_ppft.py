import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from digishear.core import PPArray, PPGridParams, is_seam_consistent
from digishear.ppft import PpftPlan, ppft_adjoint, ppft_adjoint_omega, ppft_direct, ppft_fast
from conftest import DATA
from oracles import dense, ppft_sum


def _image(rng, n):
    return rng.standard_normal((n, n))


def test_golden_table_and_float_oracle():
    data = np.load(DATA / "ppft_n4_r2.npz")
    p = PPGridParams(4, 2)
    assert data["values"].shape == (2, 9, 5)
    assert np.allclose(ppft_direct(data["image"], p).data, data["values"], atol=1e-13)
    assert np.allclose(ppft_sum(data["image"], 2), data["values"], atol=1e-12)


def test_impulse_gives_ones():
    for n, r in [(4, 2), (8, 4)]:
        img = np.zeros((n, n))
        img[n // 2, n // 2] = 1.0
        p = PPGridParams(n, r)
        assert np.allclose(ppft_direct(img, p).data, 1.0, atol=1e-14)
        assert np.allclose(ppft_fast(img, PpftPlan(p)).data, 1.0, atol=1e-12)


def test_constant_image_at_origin(rng):
    p = PPGridParams(8, 2)
    a = ppft_fast(np.ones((8, 8)), PpftPlan(p))
    assert np.allclose(a.data[:, p.rn // 2, :], 64.0)
    img = _image(rng, 8)
    b = ppft_fast(img, PpftPlan(p))
    assert np.allclose(b.data[:, p.rn // 2, :], img.sum())
    assert is_seam_consistent(b, tol=1e-10)


def test_fast_matches_direct_all_small_grids(rng):
    t0 = time.perf_counter()
    worst = 0.0
    for n in (4, 8, 16):
        for r in (2, 4, 8):
            p = PPGridParams(n, r)
            img = _image(rng, n)
            ref = ppft_direct(img, p).data
            out = ppft_fast(img, PpftPlan(p)).data
            worst = max(worst, np.abs(out - ref).max() / np.abs(ref).max())
    assert worst <= 1e-10
    assert time.perf_counter() - t0 < 5.0


@given(st.sampled_from([4, 6, 8, 10]), st.sampled_from([2, 4]), st.integers(0, 2**32 - 1))
@settings(max_examples=20, deadline=None)
def test_fast_matches_float_oracle(n, r, seed):
    img = _image(np.random.default_rng(seed), n)
    ref = ppft_sum(img, r)
    out = ppft_fast(img, PpftPlan(PPGridParams(n, r))).data
    assert np.abs(out - ref).max() <= 1e-10 * np.abs(ref).max()


def test_adjoint_identity(rng):
    p = PPGridParams(8, 4)
    plan = PpftPlan(p)
    for _ in range(20):
        x = _image(rng, 8) + 1j * _image(rng, 8)
        y = PPArray(p, rng.standard_normal(p.shape) + 1j * rng.standard_normal(p.shape))
        lhs = y.vdot(ppft_fast(x, plan)).conjugate()
        rhs = np.vdot(x, ppft_adjoint(y, plan)).conjugate()
        lhs = np.vdot(y.data, ppft_fast(x, plan).data)
        rhs = np.vdot(ppft_adjoint(y, plan), x)
        assert abs(lhs - rhs) <= 1e-12 * np.linalg.norm(x) * y.norm()


def test_omega_adjoint_identity(rng):
    p = PPGridParams(8, 2)
    plan = PpftPlan(p)
    x = _image(rng, 8)
    y = PPArray(p, rng.standard_normal(p.shape) + 1j * rng.standard_normal(p.shape))
    lhs = ppft_fast(x, plan).omega_vdot(y)
    rhs = np.vdot(ppft_adjoint_omega(y, plan), x)
    assert abs(lhs - rhs) <= 1e-12 * np.linalg.norm(x) * y.norm()


def test_zero_array_gives_zero_image():
    p = PPGridParams(4, 2)
    assert not ppft_adjoint(PPArray.zeros(p), PpftPlan(p)).any()


def test_dense_adjoint_is_conjugate_transpose():
    p = PPGridParams(4, 2)
    plan = PpftPlan(p)
    fwd = dense(lambda x: ppft_fast(x, plan).data, (4, 4), complex)
    adj = dense(lambda y: ppft_adjoint(PPArray(p, y), plan), p.shape, complex)
    assert np.abs(adj - fwd.conj().T).max() <= 1e-12


def test_wrong_size_rejected():
    with pytest.raises(ValueError):
        ppft_fast(np.zeros((6, 6)), PpftPlan(PPGridParams(4, 2)))
