import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from digishear.dsst import (
    DSSTCoeffs,
    DsstPlan,
    Filter1D,
    FilterPair,
    aniso_wavelet,
    digital_shear,
    dsst_adjoint,
    dsst_forward,
    dsst_inverse_cg,
    iterated_filters,
    maxflat_filter,
    maxflat_magnitude,
    redundancy,
    shear_set,
    spectral_factorize,
)
from oracles import aniso_sum, circulant_from_taps, dsst_band_sum

PAIR = FilterPair.maxflat(4)


def test_maxflat_magnitude_values():
    assert maxflat_magnitude(4, 4, 0.0) == 1.0
    for k in (1, 2, 5):
        assert abs(maxflat_magnitude(k, 3, 0.5)) <= 1e-30
    xi = np.linspace(0, 1, 64, endpoint=False)
    for k in (1, 2, 4, 6):
        s = maxflat_magnitude(k, k, xi) + maxflat_magnitude(k, k, xi + 0.5)
        assert np.abs(s - 1).max() <= 1e-12
    with pytest.raises(ValueError):
        maxflat_magnitude(0, 1, 0.0)


def test_spectral_factorize_trivial_and_known():
    assert np.allclose(spectral_factorize(np.array([1.0])), [1.0])
    h0 = np.array([1.0, -0.4, 0.25])
    mag2 = np.correlate(h0, h0, "full")
    h = spectral_factorize(mag2)
    xi = np.linspace(0, 1, 128, endpoint=False)
    assert np.allclose(np.abs(Filter1D(h).response(xi)), np.abs(Filter1D(h0).response(xi)), atol=1e-10)
    with pytest.raises(ValueError):
        spectral_factorize(np.array([1.0, 2.0]))


def test_maxflat_filter_spectrum():
    h = maxflat_filter(4)
    xi = np.linspace(0, 1, 256, endpoint=False)
    mag = np.abs(Filter1D(h).response(xi)) ** 2
    assert np.abs(mag - 2 * maxflat_magnitude(4, 4, xi)).max() <= 1e-8
    # orthonormal: sum h(n) h(n + 2m) = delta(m)
    auto = np.correlate(h, h, "full")[len(h) - 1::2]
    assert np.allclose(auto, np.eye(len(auto))[0], atol=1e-12)


def test_highpass_is_alternating_mirror():
    h, g = PAIR.h, PAIR.g
    xi = np.linspace(0, 1, 64, endpoint=False)
    assert np.allclose(np.abs(g.response(xi)), np.abs(h.response(xi + 0.5)), atol=1e-12)
    assert abs(g.taps.sum()) <= 1e-12


def test_iterated_filters():
    hs, gs = iterated_filters(PAIR, 4)
    assert np.array_equal(hs[1].taps, PAIR.h.taps) and hs[1].offset == PAIR.h.offset
    assert np.array_equal(gs[1].taps, PAIR.g.taps) and gs[1].offset == PAIR.g.offset
    xi = np.linspace(0, 1, 512, endpoint=False)
    ref = PAIR.h.response(xi) * PAIR.h.response(2 * xi)
    assert np.abs(hs[2].response(xi) - ref).max() <= 1e-12
    ref = PAIR.h.response(xi) * PAIR.g.response(2 * xi)
    assert np.abs(gs[2].response(xi) - ref).max() <= 1e-12
    length = len(PAIR.h.taps)
    for j in range(1, 5):
        assert len(hs[j].taps) == (2**j - 1) * (length - 1) + 1


def test_filter_dft_matches_response():
    f = Filter1D(np.array([0.5, 1.0, -0.25]), -1)
    q = np.arange(16)
    assert np.allclose(f.dft(16), f.response(q / 16), atol=1e-14)
    assert np.allclose(f.reversed().response(q / 16), np.conj(f.response(q / 16)), atol=1e-14)


def test_digital_shear_zero_is_identity(rng):
    plan = DsstPlan(32, 4)
    x = rng.standard_normal((32, 32))
    for j in range(4):
        out = digital_shear(x, j, 0, plan)
        assert np.linalg.norm(out - x) / np.linalg.norm(x) <= 1e-10


def test_digital_shear_moves_a_line():
    n, k = 32, 1
    plan = DsstPlan(n, 2)
    img = np.zeros((n, n))
    img[n // 2, :] = 1.0
    out = digital_shear(img, 1, k, plan)
    for b in range(4, n - 4):
        x2 = b - n // 2
        expected = n // 2 - k * x2 / 2
        assert abs(np.argmax(out[:, b]) - expected) <= 0.5 + 1e-9


def test_digital_shear_linear_and_checked(rng):
    plan = DsstPlan(16, 2)
    x, y = rng.standard_normal((2, 16, 16))
    lhs = digital_shear(x + 2 * y, 1, 1, plan)
    assert np.allclose(lhs, digital_shear(x, 1, 1, plan) + 2 * digital_shear(y, 1, 1, plan))
    with pytest.raises(ValueError):
        digital_shear(x, 1, 3, plan)


def test_aniso_wavelet_against_sum(rng):
    plan = DsstPlan(16, 2)
    c = rng.standard_normal((16, 16))
    g, h = plan.g[2], plan.h[1]
    ref = aniso_sum(c, g.taps, g.offset, h.taps, h.offset, 2, 1)
    assert np.abs(aniso_wavelet(c, 2, 1, plan) - ref).max() <= 1e-12


def test_aniso_wavelet_kills_constants_and_is_separable(rng):
    plan = DsstPlan(16, 2)
    assert np.abs(aniso_wavelet(np.ones((16, 16)), 1, 1, plan)).max() <= 1e-12
    c = rng.standard_normal((16, 16))
    g, h = plan.g[1].dft(16), plan.h[2].dft(16)
    first = np.fft.ifft(np.fft.fft(c, axis=0) * np.conj(g)[:, None], axis=0)
    both = np.fft.ifft(np.fft.fft(first, axis=1) * np.conj(h)[None, :], axis=1).real
    other = np.fft.ifft(np.fft.fft(c, axis=1) * np.conj(h)[None, :], axis=1)
    other = np.fft.ifft(np.fft.fft(other, axis=0) * np.conj(g)[:, None], axis=0).real
    assert np.allclose(both, other, atol=1e-12)
    assert np.allclose(aniso_wavelet(c, 1, 2, plan), both[::2, ::4], atol=1e-12)


def _positions(n, step):
    count = Fraction(n) / step
    return np.array([math.floor(step * t + Fraction(1, 2)) for t in range(int(count))]) % n


def test_forward_matches_monolithic_oracle(rng):
    n, big_j = 16, 2
    plan = DsstPlan(n, big_j)
    img = rng.standard_normal((n, n))
    c = dsst_forward(img, plan)
    worst = 0.0
    for cone, j, k in plan.keys:
        jr, js = math.ceil(j / 2), j // 2
        g, hw, hr = plan.g[big_j - j], plan.h[big_j - js], plan.h[jr]
        p1 = _positions(n, Fraction(2 ** (big_j - j)))
        p2 = _positions(n, Fraction(2 ** (big_j - js)))
        x = img if cone == 1 else img.T
        ref = dsst_band_sum(x, (hr.taps, hr.offset), (g.taps, g.offset), (hw.taps, hw.offset),
                            2**jr, k, p1, p2)
        worst = max(worst, np.abs(c.bands[(cone, j, k)] - ref).max())
    hj = plan.h[big_j]
    hm = circulant_from_taps(hj.taps, hj.offset, n)
    q = _positions(n, Fraction(2 ** (big_j - 1)))
    low = hm.T[q] @ img @ hm.T[q].T
    worst = max(worst, np.abs(c.low - low).max())
    assert worst <= 1e-10


def test_shear_sets_cover_each_diagonal_once():
    for j in range(5):
        s = 2 ** math.ceil(j / 2)
        assert list(shear_set(1, j)) == list(range(-s, s))
        assert list(shear_set(2, j)) == list(range(-s + 1, s + 1))


def test_zero_image_gives_zero(rng):
    plan = DsstPlan(16, 2)
    c = dsst_forward(np.zeros((16, 16)), plan)
    assert not c.to_vector().any()


def test_adjoint_identity(rng):
    plan = DsstPlan(32, 3)
    for _ in range(20):
        x = rng.standard_normal((32, 32))
        c = dsst_forward(x, plan)
        y = c.like(rng.standard_normal(c.count))
        lhs = np.dot(c.to_vector(), y.to_vector())
        rhs = np.vdot(x, dsst_adjoint(y, plan))
        assert abs(lhs - rhs) <= 1e-12 * np.linalg.norm(x) * np.linalg.norm(y.to_vector())


def test_cg_roundtrip_at_64(rng):
    plan = DsstPlan(64, 3)
    x = rng.uniform(size=(64, 64))
    res = dsst_inverse_cg(dsst_forward(x, plan), plan)
    assert res.converged
    assert np.linalg.norm(res.image - x) / np.linalg.norm(x) <= 1e-6


def test_redundancy_formula_and_count():
    r = redundancy(5, 1, "0.4")
    assert r.limit == Fraction(10, 3)
    assert r.finite == Fraction(10 * (1024 + 2), 3 * 1024)
    assert redundancy(3).limit == Fraction(4, 3)
    plan = DsstPlan(64, 5, 1, "0.4")
    assert Fraction(plan.count(), 64**2) == r.finite
    assert abs(float(r.finite) - 10 / 3) <= 0.05 * 10 / 3
    c = dsst_forward(np.zeros((64, 64)), plan)
    assert c.count == plan.count()


@given(st.integers(1, 4), st.sampled_from([1, 2, 4]))
@settings(max_examples=20, deadline=None)
def test_redundancy_matches_index_sets(big_j, c1):
    n = 64
    plan = DsstPlan(n, big_j, c1, 1)
    assert Fraction(plan.count(), n * n) == redundancy(big_j, c1, 1).finite


def test_bad_plans_rejected():
    with pytest.raises(ValueError):
        DsstPlan(24, 2)
    with pytest.raises(ValueError):
        DsstPlan(16, 5)
    with pytest.raises(ValueError):
        DsstPlan(16, 2, c1=0)


def test_coefficient_vector_roundtrip(rng):
    plan = DsstPlan(16, 2)
    c = dsst_forward(rng.standard_normal((16, 16)), plan)
    v = c.to_vector()
    assert np.array_equal(c.like(v).to_vector(), v)
    assert isinstance(c.like(v), DSSTCoeffs)


def test_digital_shear_is_a_contraction_and_undoes_itself_on_smooth_images(rng):
    plan = DsstPlan(64, 4)
    x = rng.standard_normal((64, 64))
    for j in range(1, 4):
        for k in (-2, -1, 1, 2):
            assert np.linalg.norm(digital_shear(x, j, k, plan)) <= np.linalg.norm(x) * (1 + 1e-12)
    u = np.arange(64) - 32
    smooth = np.exp(-(u[:, None] ** 2 + u[None, :] ** 2) / 200.0)
    back = digital_shear(digital_shear(smooth, 2, 1, plan), 2, -1, plan)
    assert np.linalg.norm(back - smooth) / np.linalg.norm(smooth) <= 1e-3
