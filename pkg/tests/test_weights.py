import numpy as np
import pytest

from digishear.core import PPArray, PPGridParams, grid_multiplicity, is_seam_consistent
from digishear.ppft import PpftPlan, ppft_adjoint, ppft_fast
from digishear.weights import (
    apply_weights,
    basis_choice1,
    basis_choice2,
    basis_constant,
    fit_weights,
    gram_apply,
    gram_condition,
    load_weights,
    make_basis,
    save_weights,
    unit_weights,
    weights_for,
)
from oracles import dense


def test_choice1_tables():
    p = PPGridParams(8, 4)
    b = basis_choice1(p)
    assert len(b) == 5
    center = np.zeros(p.shape, dtype=bool)
    center[:, p.rn // 2, :] = True
    assert np.array_equal(b.tables[0] != 0, center)
    assert np.all(b.tables[0][center] == 1)
    # interior point with n = 3 carries |n|
    assert b.tables[4][0, p.rn // 2 + 3, p.n // 2] == 3
    assert b.tables[4][1, p.rn // 2 - 3, p.n // 2 + 1] == 3


def test_choice1_partitions_the_grid():
    b = basis_choice1(PPGridParams(8, 4))
    nonzero = np.sum([t != 0 for t in b.tables], axis=0)
    assert np.all(nonzero == 1)


def test_choice2_count_and_coverage():
    p = PPGridParams(8, 4)
    b = basis_choice2(p)
    assert len(b) == p.n // 2 + 2
    assert np.array_equal(b.tables[0], basis_choice1(p).tables[0])
    assert np.all(np.sum(b.tables, axis=0) > 0)


def test_unknown_choice():
    with pytest.raises(ValueError):
        make_basis(PPGridParams(4, 2), 7)


def _dense_gram(values, p):
    plan = PpftPlan(p)
    absorbed = values / grid_multiplicity(p)
    return dense(lambda x: ppft_adjoint(ppft_fast(x, plan) * absorbed, plan), (p.n, p.n), complex)


def test_constant_basis_matches_one_variable_least_squares():
    p = PPGridParams(4, 2)
    w = fit_weights(basis_constant(p))
    g1 = _dense_gram(np.ones(p.shape), p)
    # minimize ||c G1 - I||_F over c >= 0
    c = np.trace(g1).real / np.sum(np.abs(g1) ** 2)
    assert np.isclose(w.coefficients[0], c, rtol=1e-10)


def test_fit_solves_the_frobenius_problem():
    p = PPGridParams(4, 2)
    basis = basis_choice1(p)
    grams = [_dense_gram(t, p) for t in basis.tables]
    a = np.stack([g.ravel() for g in grams], axis=1)
    target = np.eye(p.n * p.n).ravel()
    w = fit_weights(basis)
    fitted = np.linalg.norm(a @ w.coefficients - target)
    # no nonnegative coefficient vector does better
    rng = np.random.default_rng(3)
    for _ in range(200):
        trial = np.clip(w.coefficients + 0.05 * rng.standard_normal(5) * w.coefficients.max(), 0, None)
        assert np.linalg.norm(a @ trial - target) >= fitted - 1e-12


def test_fitted_weights_symmetric_and_nonnegative():
    w = fit_weights(basis_choice1(PPGridParams(8, 4)))
    v = w.values
    assert np.all(v >= 0)
    assert np.array_equal(v[0], v[1])
    assert np.array_equal(v, v[:, ::-1, ::-1])


def test_residual_recorded_at_high_oversampling():
    w = fit_weights(basis_choice1(PPGridParams(8, 16)))
    assert np.isfinite(w.residual_rms) and np.isfinite(w.residual_max)
    assert w.residual_rms < 0.02


def test_apply_weights_modes(rng):
    p = PPGridParams(8, 2)
    a = ppft_fast(rng.standard_normal((8, 8)), PpftPlan(p))
    assert np.array_equal(apply_weights(a, unit_weights(p)).data, a.data)
    w = fit_weights(basis_choice1(p))
    twice = apply_weights(apply_weights(a, w, "sqrt"), w, "sqrt")
    assert np.allclose(twice.data, apply_weights(a, w, "full").data, rtol=1e-14)
    assert is_seam_consistent(a, tol=1e-10)
    assert is_seam_consistent(apply_weights(a, w), tol=1e-10)


def test_condition_matches_dense_eigenvalues():
    p = PPGridParams(4, 2)
    w = unit_weights(p)
    eig = np.linalg.eigvalsh(_dense_gram(w.values, p))
    hi, lo, cond = gram_condition(w)
    assert np.isclose(lo, eig[0], rtol=1e-6)
    assert np.isclose(hi, eig[-1], rtol=1e-6)
    assert np.isclose(cond, eig[-1] / eig[0], rtol=1e-6)


def test_gram_apply_is_self_adjoint(rng):
    p = PPGridParams(8, 4)
    plan = PpftPlan(p)
    w = fit_weights(basis_choice1(p))
    x, y = rng.standard_normal((8, 8)), rng.standard_normal((8, 8))
    assert np.isclose(np.vdot(y, gram_apply(x, w, plan)), np.vdot(gram_apply(y, w, plan), x))


@pytest.mark.parametrize("choice,target", [(1, 1.379), (2, 1.760)])
def test_condition_numbers_at_32(choice, target):
    w = weights_for(PPGridParams(32, 8), choice)
    _, _, cond = gram_condition(w)
    assert abs(cond - target) <= 0.1 * target


def test_weight_file_roundtrip(tmp_path):
    w = fit_weights(basis_choice2(PPGridParams(8, 2)))
    path = tmp_path / "w.shwt"
    save_weights(w, path)
    back = load_weights(path)
    assert back.params == w.params and back.choice == 2
    assert np.array_equal(back.values, w.values)
    assert np.array_equal(back.coefficients, w.coefficients)
    raw = path.read_bytes()
    path.write_bytes(raw[:-8])
    with pytest.raises(ValueError):
        load_weights(path)
    path.write_bytes(b"XXXX" + raw[4:])
    with pytest.raises(ValueError):
        load_weights(path)


def test_cache_directory_is_used(tmp_path, monkeypatch):
    monkeypatch.setenv("DIGISHEAR_CACHE", str(tmp_path))
    p = PPGridParams(8, 2)
    first = weights_for(p, 1)
    assert list(tmp_path.glob("*.shwt"))
    assert np.array_equal(weights_for(p, 1).values, first.values)
