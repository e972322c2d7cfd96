from math import factorial, pi, sqrt

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import eval_genlaguerre, eval_hermite as sp_hermite

from twistfock.specfun import (
    BasisSpec,
    CapacityError,
    ComplexPoint,
    DimensionError,
    InvalidScaleError,
    MultiIndex,
    eval_hermite,
    eval_special_hermite,
    hermite_basis_values,
    hermite_functions,
    laguerre,
    laguerre_function,
    multi_indices,
    special_hermite_values,
)


def scipy_hermite_function(k, x):
    # independent oracle: physicists' polynomial with explicit normalisation
    if np.iscomplexobj(x):
        poly = np.polynomial.hermite.hermval(x, [0] * k + [1])
    else:
        poly = sp_hermite(k, x)
    return poly * np.exp(-x * x / 2) / sqrt(2.0 ** k * factorial(k) * sqrt(pi))


# ---------------------------------------------------------------- values

def test_ground_state_at_origin():
    assert eval_hermite((0,), 1.0, [0.0]) == pytest.approx(pi ** -0.25, rel=1e-14)


def test_odd_function_vanishes_at_origin():
    assert eval_hermite((1,), 1.0, [0.0]) == 0


def test_scaled_ground_state():
    assert eval_hermite((0,), 4.0, [0.0]).real == pytest.approx(sqrt(2) * pi ** -0.25, rel=1e-14)


@pytest.mark.parametrize("k", [0, 1, 2, 5, 11, 20])
def test_hermite_functions_match_scipy(k):
    x = np.linspace(-4, 4, 33)
    got = hermite_functions(k, x)[k].real
    assert np.allclose(got, scipy_hermite_function(k, x), rtol=1e-10, atol=1e-13)


@pytest.mark.parametrize("lam", [0.5, 1.0, 3.0, -2.0])
def test_scaling_rule(lam):
    x = np.linspace(-2, 2, 9)
    a = abs(lam)
    for k in range(4):
        got = eval_hermite((k,), lam, x[:, None])
        want = a ** 0.25 * scipy_hermite_function(k, sqrt(a) * x)
        assert np.allclose(got, want, rtol=1e-12, atol=1e-14)


def test_quadrature_normalisation_of_scaled_ground_state():
    t, w = np.polynomial.hermite.hermgauss(40)
    # int Phi_0^4(x)^2 dx with Phi^2 ~ e^{-4x^2}; substitute x = t/2
    vals = eval_hermite((0,), 4.0, (t / 2)[:, None]) ** 2 * np.exp(t * t)
    assert np.sum(w * vals).real / 2 == pytest.approx(1.0, rel=1e-12)


def test_tensor_product_in_two_dimensions():
    pts = np.array([[0.3, -0.7], [1.1, 0.2]])
    got = eval_hermite((2, 1), 1.0, pts)
    want = scipy_hermite_function(2, pts[:, 0]) * scipy_hermite_function(1, pts[:, 1])
    assert np.allclose(got, want, rtol=1e-12)


def test_complex_point_input():
    z = ComplexPoint((0.4,), (0.3,))
    want = scipy_hermite_function(3, 0.4 + 0.3j)
    assert eval_hermite((3,), 1.0, z) == pytest.approx(want, rel=1e-12)


@given(st.floats(-3, 3), st.floats(-1.5, 1.5), st.integers(0, 12))
def test_schwarz_reflection(re, im, k):
    z = np.array([[re + 1j * im]])
    assert np.allclose(eval_hermite((k,), 1.0, np.conj(z)), np.conj(eval_hermite((k,), 1.0, z)),
                       rtol=1e-12, atol=1e-14)


def test_zero_scale_rejected():
    with pytest.raises(InvalidScaleError):
        eval_hermite((0,), 0.0, [0.0])


def test_capacity_error():
    with pytest.raises(CapacityError):
        laguerre_function(10_000, 1, 1.0, [0.0, 0.0])


def test_multi_index_rejects_negative():
    with pytest.raises(ValueError):
        MultiIndex((1, -1))


def test_graded_order():
    assert multi_indices(2, 2) == ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))


def test_basis_eigenvalues():
    b = BasisSpec(2, 1.5, 3, 16)
    assert np.allclose(b.eigenvalues(), (2 * b.degrees + 2) * 1.5)


# ---------------------------------------------------------------- Laguerre

@pytest.mark.parametrize("k,alpha", [(0, 0), (1, 0), (3, 0), (4, 1), (6, 2)])
def test_laguerre_matches_scipy(k, alpha):
    x = np.linspace(0, 8, 17)
    assert np.allclose(laguerre(k, alpha, x), eval_genlaguerre(k, alpha, x), rtol=1e-11, atol=1e-12)


def test_laguerre_function_at_origin():
    assert laguerre_function(0, 1, 1.0, [0.0, 0.0]) == pytest.approx(1.0)
    assert laguerre_function(1, 1, 1.0, [0.0, 0.0]) == pytest.approx(1.0)


def test_laguerre_function_grows_in_imaginary_direction():
    assert laguerre_function(0, 1, 1.0, [2j, 0.0]) == pytest.approx(np.e, rel=1e-14)


def test_laguerre_function_real_oracle(rng):
    pts = rng.normal(size=(5, 2))
    Q = np.sum(pts ** 2, axis=1)
    for k in range(4):
        want = eval_genlaguerre(k, 0, 0.5 * Q) * np.exp(-0.25 * Q)
        assert np.allclose(laguerre_function(k, 1, 1.0, pts), want, rtol=1e-12)


# ---------------------------------------------------------------- special Hermite

def test_special_ground_state_at_origin():
    assert eval_special_hermite((0,), (0,), 1.0, [0.0, 0.0]) == pytest.approx((2 * pi) ** -0.5, rel=1e-14)


def test_special_off_diagonal_at_origin():
    assert abs(eval_special_hermite((0,), (1,), 1.0, [0.0, 0.0])) < 1e-15


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        eval_special_hermite((0,), (0, 1), 1.0, [0.0, 0.0])


@pytest.mark.parametrize("lam", [0.7, 1.0, -1.3])
def test_closed_form_matches_quadrature(lam, rng):
    pts = rng.normal(size=(5, 2))
    for a in range(4):
        for b in range(4):
            closed = eval_special_hermite((a,), (b,), lam, pts)
            quad = eval_special_hermite((a,), (b,), lam, pts, method="quadrature")
            assert np.allclose(closed, quad, atol=1e-12)


def test_quadrature_route_refuses_complex_points():
    with pytest.raises(ValueError):
        eval_special_hermite((0,), (0,), 1.0, [1j, 0.0], method="quadrature")


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_laguerre_sum(k, rng):
    # diagonal shell sum equals the Laguerre function up to the special Hermite prefactor
    lam = 1.0
    pts = rng.normal(size=(5, 2))
    pre = (2 * pi) ** -0.5 * abs(lam) ** 0.5
    shell = special_hermite_values(lam, 1, [((k,), (k,))], pts)[0]
    assert np.allclose(shell, pre * laguerre_function(k, 1, lam, pts), atol=1e-12)


def test_laguerre_sum_two_dimensions(rng):
    lam, n, k = 0.8, 2, 2
    pts = rng.normal(size=(5, 4)) * 0.7
    pairs = [(a, a) for a in multi_indices(2, k) if sum(a) == k]
    shell = special_hermite_values(lam, n, pairs, pts).sum(axis=0)
    pre = (2 * pi) ** -1 * abs(lam)
    assert np.allclose(shell, pre * laguerre_function(k, n, lam, pts), atol=1e-12)


def test_special_hermite_orthonormal():
    lam = 1.0
    t, w = np.polynomial.hermite.hermgauss(40)
    # Phi_ab decays like e^{-|lam| |X|^2 / 4}; rule for e^{-|X|^2/2} after x = sqrt(2) t
    s = sqrt(2.0) * t
    X = np.stack(np.meshgrid(s, s, indexing="ij"), -1).reshape(-1, 2)
    W = (np.outer(w, w).ravel() * 2) * np.exp(np.sum(X ** 2, axis=1) / 2)
    pairs = [((a,), (b,)) for a in range(4) for b in range(4)]
    V = special_hermite_values(lam, 1, pairs, X)
    G = (V * W) @ np.conj(V).T
    assert np.allclose(G, np.eye(len(pairs)), atol=1e-10)


def test_hermite_basis_gram():
    b = BasisSpec(1, 2.0, 10, 64)
    t, w = np.polynomial.hermite.hermgauss(40)
    x = t / sqrt(2.0)
    V = hermite_basis_values(b, x[:, None]).real * np.exp(x * x)
    G = (V * w / sqrt(2.0)) @ V.T
    assert np.allclose(G, np.eye(b.size), atol=1e-10)
