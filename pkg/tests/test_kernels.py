import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from digishear import kernels

compiled = pytest.mark.skipif(kernels.BACKEND != "cython", reason="extension not built")

finite = st.floats(-1e6, 1e6, allow_nan=False)


def test_shear_rows_definition():
    x = np.arange(12.0).reshape(4, 3)
    out = kernels.numpy_kernels.shear_rows(x, 1, 1)
    for n1 in range(4):
        for b in range(3):
            assert out[n1, b] == x[(n1 + (b - 1)) % 4, b]


def test_holder_exponent_of_a_cone():
    # |u| + |v| grows linearly away from its apex, exponent 1 there
    u = np.abs(np.arange(32) - 16.0)
    img = u[:, None] + u[None, :]
    assert kernels.numpy_kernels.holder_exponents(img, 4)[16, 16] == pytest.approx(1.0)
    assert np.isnan(kernels.numpy_kernels.holder_exponents(np.ones((8, 8)), 2)).all()
    with pytest.raises(ValueError):
        kernels.holder_exponents(img, 1)


@compiled
@given(arrays(float, st.tuples(st.integers(1, 12), st.integers(1, 12)), elements=finite),
       st.integers(-5, 5), st.integers(-6, 6))
@settings(max_examples=60, deadline=None)
def test_compiled_shear_matches_numpy(x, k, center):
    assert np.array_equal(kernels.active.shear_rows(x, k, center),
                          kernels.numpy_kernels.shear_rows(x, k, center))


@compiled
@given(arrays(float, st.tuples(st.integers(5, 12), st.integers(5, 12)),
              elements=st.floats(-10, 10, allow_nan=False)),
       st.integers(2, 3))
@settings(max_examples=40, deadline=None)
def test_compiled_holder_matches_numpy(img, radius):
    a = kernels.active.holder_exponents(img, radius)
    b = kernels.numpy_kernels.holder_exponents(img, radius)
    assert np.array_equal(np.isnan(a), np.isnan(b))
    ok = ~np.isnan(a)
    assert np.allclose(a[ok], b[ok], rtol=0, atol=1e-12)


def test_complex_input_uses_fallback(rng):
    x = rng.standard_normal((6, 4)) + 1j * rng.standard_normal((6, 4))
    out = kernels.shear_rows(x, 2, 2)
    assert np.array_equal(out.real, kernels.numpy_kernels.shear_rows(x.real, 2, 2))


def test_backend_can_be_forced_to_numpy():
    env = dict(os.environ, DIGISHEAR_BACKEND="numpy")
    out = subprocess.run([sys.executable, "-c", "import digishear; print(digishear.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
