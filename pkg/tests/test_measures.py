import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from digishear import measures as ms
from digishear.measures import MeasureConfig, decay_rate, keep_largest


def test_decay_rate_of_exponential():
    assert decay_rate(np.exp(-np.arange(20.0))) == pytest.approx(-1.0, abs=1e-12)
    assert decay_rate(np.ones(10)) == 0.0
    assert decay_rate(np.r_[1.0, 0.5, np.zeros(5)]) == -math.inf
    assert decay_rate([3.0]) == 0.0
    assert decay_rate(np.zeros(4)) == -math.inf


@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=30))
@settings(max_examples=50, deadline=None)
def test_decay_rate_never_positive(values):
    # the majorant is nonincreasing, so its fitted slope cannot be positive
    assert decay_rate(values) <= 1e-12


def test_default_scales():
    assert [ms.default_scales(n) for n in (8, 16, 32, 64, 128, 256)] == [1, 1, 2, 3, 4, 4]


def test_config_validation():
    with pytest.raises(ValueError):
        MeasureConfig(transform="curvelet")
    with pytest.raises(ValueError):
        MeasureConfig(size=48)
    assert MeasureConfig(size=128).resolved_scales == 4


def test_random_streams_are_reproducible():
    a = ms.random_uniform(8, 7, 1)
    assert np.array_equal(a, ms.random_uniform(8, 7, 1))
    assert not np.array_equal(a, ms.random_uniform(8, 7, 2))
    assert 0 < a.min() and a.max() < 1


def test_m1_is_exact_and_self_test_detects_half_scaling():
    cfg = MeasureConfig(size=32, trials=3)
    assert ms.m1_algebraic_exactness(cfg).values["M_alg"] <= 1e-12
    half = ms.m1_algebraic_exactness(cfg, synthesis_scale=0.5).values["M_alg"]
    assert half == pytest.approx(0.5, abs=1e-12)


def test_m1_is_seed_robust():
    for seed in (1, 2, 3):
        assert ms.m1_algebraic_exactness(MeasureConfig(size=16, trials=2, seed=seed)).values["M_alg"] <= 1e-12


def test_m2_and_m3_at_32():
    cfg = MeasureConfig(size=32, trials=2)
    v = ms.m2_isometry(cfg).values
    assert v["M_isom1"] <= 1.5e-2
    assert 1.0 <= v["M_isom2"] <= 1.6
    assert v["M_isom3"] <= 1e-5
    v = ms.m3_parseval(cfg).values
    assert v["M_tight2"] <= 1e-5


def test_unit_weights_are_far_from_isometric():
    from digishear.core import PPGridParams
    from digishear.ppft import PpftPlan
    from digishear.weights import gram_condition, unit_weights

    params = PPGridParams(16, 8)
    _, _, cond = gram_condition(unit_weights(params), PpftPlan(params))
    assert cond > 10


def test_m3_wavelet_self_test():
    v = ms.m3_parseval(MeasureConfig(transform="wavelet", size=32, trials=2)).values
    assert v["M_tight1"] <= 1e-12 and v["M_tight2"] <= 1e-12


def test_m3_for_undecimated_dnst():
    v = ms.m3_parseval(MeasureConfig(transform="dnst", size=32, trials=1, scales=2)).values
    assert v["M_tight2"] <= 1e-10


def test_m4_gaussian_self_test():
    img = ms.gaussian_image(64, 16.0)
    v = ms.m4_spacefreq(MeasureConfig(size=64), image=img).values
    assert v["M_supp"] == pytest.approx(1.0)
    # every line is the same log-quadratic profile up to a constant, so the
    # mean rate is the least-squares slope of -x^2 / (2 var) over the half line
    x = np.arange(32.0)
    expected = np.polyfit(x, -x**2 / 32.0, 1)[0]
    assert v["M_decay1"] == pytest.approx(expected, rel=0.05)
    assert v["M_decay2"] < -0.5
    assert v["M_smooth1"] > 0.5


def test_m4_rejects_small_sizes():
    with pytest.raises(ValueError):
        ms.m4_spacefreq(MeasureConfig(size=32))


def test_m5_zero_shear_is_zero():
    v = ms.m5_shear_invariance(MeasureConfig(size=32, trials=1), shears=(0.0,)).values
    assert v and all(x == 0.0 for x in v.values())


def test_m7_transpose_symmetry():
    # cone 2 filters are transposes of cone 1, so a transposed edge gives identical curves
    tr = ms.make_transform(MeasureConfig(transform="dnst", size=32, scales=2))
    _, s1, i1 = ms.geometric_curves(tr, [(0.5, False)])
    _, s2, i2 = ms.geometric_curves(tr, [(0.5, True)])
    assert np.allclose(s1, s2, atol=1e-12) and np.allclose(i1, i2, atol=1e-12)


def test_edge_image_transpose():
    assert np.array_equal(ms.edge_image(16, 0.5, True), ms.edge_image(16, 0.5).T)
    step = ms.edge_image(16, taper=False)
    assert step[8, 3] == 0.5 and step[9, 3] == 1.0 and step[7, 3] == 0.0


def test_keep_largest_and_threshold():
    v = np.array([1.0, -4.0, 2.0, 3.0])
    assert np.array_equal(keep_largest(v, 0.5), [0, -4.0, 0, 3.0])
    assert np.array_equal(keep_largest(v, 1.0), v)
    assert np.array_equal(ms.hard_threshold(v, 1.0), [0, -4.0, 2.0, 3.0])
    assert np.array_equal(ms.hard_threshold(v, 64), [0, -4.0, 0, 0])


def test_m8_keeping_everything_is_exact():
    cfg = MeasureConfig(transform="dnst", size=32, scales=2)
    rep = ms.m8_stability(cfg, p1s=(0,), p2s=(0,), variance=16.0)
    assert rep.values["thres1_p0"] <= 1e-10
    assert rep.values["thres2_p0"] <= 1e-10


def test_applicability():
    with pytest.raises(ValueError):
        ms.m2_isometry(MeasureConfig(transform="dsst", size=32))
    with pytest.raises(ValueError):
        ms.run_measure(9, MeasureConfig())


def test_report_outputs(tmp_path):
    rep = ms.m1_algebraic_exactness(MeasureConfig(size=16, trials=1))
    paths = ms.MeasureReport.write(rep, tmp_path)
    assert all(p.exists() for p in paths)
    data = json.loads(paths[1].read_text())
    assert data["measure"] == 1 and "M_alg" in data["values"]
    again = ms.m1_algebraic_exactness(MeasureConfig(size=16, trials=1))
    assert rep.digest() == again.digest()
    assert rep.config["scales"] == 1


def test_m6_digest_ignores_timings():
    cfg = MeasureConfig(transform="wavelet", size=16, scales=1)
    a = ms.m6_speed(cfg, exponents=(3, 4))
    b = ms.m6_speed(cfg, exponents=(3, 4))
    assert a.digest() == b.digest()
    assert set(a.values) == {"M_speed1", "M_speed2", "M_speed3"}
