from math import pi, sinh

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from twistfock.heisen import CoeffVector, twisted_convolve_coeffs, weyl_constant
from twistfock.quad import Sampler
from twistfock.semigrp import (
    DivergenceError,
    KernelParameterError,
    KernelSpec,
    hermite_semigroup,
    holomorphic_extend,
    kappa,
    laguerre_pairing,
    left_heat_convolution,
    sandwich,
    special_hermite_semigroup,
    twisted_heat_coeffs,
    twisted_heat_kernel,
    twisted_heat_series,
)
from twistfock.specfun import BasisSpec, eval_hermite

PTS = np.array([[0.3, -0.2], [-0.7, 0.5], [1.1, 0.4]])


# ---------------------------------------------------------------- kernels

def test_heat_kernel_at_origin():
    assert KernelSpec("heat", 0.5)([0.0]) == pytest.approx((2 * pi) ** -0.5, rel=1e-15)


def test_heat_kernel_is_normalised():
    t, w = np.polynomial.hermite.hermgauss(30)
    # q_1(x) = (4 pi)^{-1/2} e^{-x^2/4}; substitute x = 2s
    vals = KernelSpec("heat", 1.0)((2 * t)[:, None]) * np.exp(t * t) * 2
    assert np.sum(w * vals).real == pytest.approx(1.0, rel=1e-13)


@pytest.mark.parametrize("t", [0.0, -1.0])
def test_kernel_time_must_be_positive(t):
    with pytest.raises(KernelParameterError):
        KernelSpec("heat", t)


def test_twisted_kernel_needs_scale():
    with pytest.raises(KernelParameterError):
        KernelSpec("twisted", 1.0, 0.0)
    with pytest.raises(KernelParameterError):
        twisted_heat_kernel(1.0, 0.0, [0.0, 0.0])


def test_kappa_calibration():
    assert kappa(1) == pytest.approx(1 / (4 * pi), rel=1e-12)
    assert kappa(2) == pytest.approx(1 / (4 * pi) ** 2, rel=1e-10)


def test_twisted_kernel_at_origin():
    assert twisted_heat_kernel(1.0, 1.0, [0.0, 0.0]) == pytest.approx(kappa(1) / sinh(1.0), rel=1e-14)


@pytest.mark.parametrize("t,lam", [(0.3, 1.0), (1.0, 1.0), (0.5, 2.0)])
def test_laguerre_series_matches_closed_form(t, lam, rng):
    pts = rng.normal(size=(5, 2))
    ratio = twisted_heat_kernel(t, lam, pts, 1) / twisted_heat_series(t, lam, pts, 1, kmax=40)
    # a single calibrated prefactor relates the two
    assert np.allclose(ratio, ratio[0], rtol=1e-8)
    assert ratio[0].real == pytest.approx(abs(lam) / (2 * pi), rel=1e-8)


@given(st.floats(0.05, 2), st.floats(0.2, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_twisted_kernel_even_in_lambda(t, lam, x, u):
    p = twisted_heat_kernel(t, lam, [x, u])
    assert twisted_heat_kernel(t, -lam, [x, u]) == pytest.approx(p, rel=1e-12, abs=1e-300)


def test_kernel_coefficients_reproduce_kernel():
    b = BasisSpec(1, 1.0, 30, 64)
    c = twisted_heat_coeffs(0.4, b)
    assert not c.exact
    assert np.allclose(c.evaluate(PTS), twisted_heat_kernel(0.4, 1.0, PTS, 1), rtol=1e-10)


# ---------------------------------------------------------------- Hermite semigroup

def test_hermite_semigroup_on_eigenfunction():
    b = BasisSpec(1, 1.5, 6, 16)
    for k in range(4):
        f = CoeffVector.basis_element(b, (k,))
        out = hermite_semigroup(0.3, f)
        assert np.allclose(out.coeffs, np.exp(-0.3 * (2 * k + 1) * 1.5) * f.coeffs)


def test_special_hermite_eigenvalues_of_full_operator():
    b = BasisSpec(1, 1.0, 4, 16)
    f = CoeffVector.basis_element(b, (2,), (1,))
    out = hermite_semigroup(0.2, f)
    assert np.allclose(out.coeffs, np.exp(-0.2 * (2 * 3 + 2)) * f.coeffs)


def test_time_zero_is_identity(rng):
    f = CoeffVector.random(BasisSpec(1, 1.0, 6, 16), rng, "hermite")
    assert np.array_equal(hermite_semigroup(0.0, f).coeffs, f.coeffs)


@given(st.floats(0, 2), st.floats(0, 2))
def test_semigroup_law(t1, t2):
    f = CoeffVector.random(BasisSpec(1, 1.0, 6, 16), np.random.default_rng(0), "special", terms=8)
    a = hermite_semigroup(t1, hermite_semigroup(t2, f)).coeffs
    b = hermite_semigroup(t1 + t2, f).coeffs
    assert np.allclose(a, b, rtol=1e-13, atol=0)


@given(st.floats(0, 3))
def test_contraction(t):
    f = CoeffVector.random(BasisSpec(1, 1.0, 6, 16), np.random.default_rng(1), "hermite", terms=5)
    assert hermite_semigroup(t, f).norm() <= f.norm()


def test_negative_time_rejected(rng):
    f = CoeffVector.random(BasisSpec(1, 1.0, 4, 16), rng, "hermite")
    with pytest.raises(KernelParameterError):
        hermite_semigroup(-0.1, f)


# ---------------------------------------------------------------- special Hermite semigroup

def test_right_and_left_damping():
    t, lam = 0.25, 1.0
    b = BasisSpec(1, lam, 4, 16)
    for a in range(3):
        for c in range(3):
            f = CoeffVector.basis_element(b, (a,), (c,))
            right = special_hermite_semigroup(t, lam, f).coeffs
            left = left_heat_convolution(t, lam, f).coeffs
            assert np.allclose(right, np.exp(-t * (2 * c + 1) * lam) * f.coeffs)
            assert np.allclose(left, np.exp(-t * (2 * a + 1) * lam) * f.coeffs)


def test_right_damping_is_convolution_with_kernel(rng):
    b = BasisSpec(1, 1.0, 40, 96)
    f = CoeffVector.random(b, rng, terms=5, max_degree=3)
    via_kernel = twisted_convolve_coeffs(f, twisted_heat_coeffs(0.3, b)).coeffs
    assert np.allclose(via_kernel, special_hermite_semigroup(0.3, 1.0, f).coeffs, atol=1e-13)


def test_engines_agree(rng):
    b = BasisSpec(1, 1.0, 3, 16)
    f = CoeffVector.random(b, rng, terms=4, max_degree=3)
    grid = special_hermite_semigroup(0.3, 1.0, f, engine="grid")(PTS)
    coeff = special_hermite_semigroup(0.3, 1.0, f).evaluate(PTS)
    assert np.max(np.abs(grid - coeff)) / np.max(np.abs(coeff)) < 1e-6


def test_growing_input_refused():
    grow = Sampler(lambda X: np.exp(np.sum(X * X, axis=1)), 2, -1.0)
    with pytest.raises(DivergenceError):
        special_hermite_semigroup(0.3, 1.0, grow, engine="grid")
    with pytest.raises(DivergenceError):
        sandwich(0.3, 1.0, grow, engine="grid")


# ---------------------------------------------------------------- sandwich

def test_sandwich_on_basis_elements():
    t, lam = 0.3, 1.0
    b = BasisSpec(1, lam, 4, 16)
    for a in range(3):
        for c in range(3):
            f = CoeffVector.basis_element(b, (a,), (c,))
            want = np.exp(-t * (2 * a + 2 * c + 2) * lam) * f.coeffs
            assert np.max(np.abs(sandwich(t, lam, f).coeffs - want)) < 1e-12


@pytest.mark.parametrize("lam", [0.5, 1.0, -1.5])
def test_sandwich_equals_hermite_semigroup(lam, rng):
    b = BasisSpec(1, lam, 6, 16)
    f = CoeffVector.random(b, rng, terms=10)
    assert np.max(np.abs(sandwich(0.3, lam, f).coeffs - hermite_semigroup(0.3, f).coeffs)) < 1e-12


def test_sandwich_two_dimensions(rng):
    b = BasisSpec(2, 1.0, 3, 16)
    f = CoeffVector.random(b, rng, terms=10)
    assert np.max(np.abs(sandwich(0.2, 1.0, f).coeffs - hermite_semigroup(0.2, f).coeffs)) < 1e-12


def test_sandwich_grid_engine(rng):
    b = BasisSpec(1, 1.0, 3, 16)
    f = CoeffVector.random(b, rng, terms=3, max_degree=2)
    g = sandwich(0.3, 1.0, f, engine="grid", order=24)(PTS)
    ref = hermite_semigroup(0.3, f).evaluate(PTS)
    assert np.max(np.abs(g - ref)) / np.max(np.abs(ref)) < 1e-5


def test_sandwich_grid_detects_wrong_prefactor(rng):
    b = BasisSpec(1, 1.0, 3, 16)
    f = CoeffVector.random(b, rng, terms=3, max_degree=2)
    g = sandwich(0.3, 1.0, f, engine="grid", order=24, kernel_prefactor=1.01)(PTS)
    ref = hermite_semigroup(0.3, f).evaluate(PTS)
    assert np.max(np.abs(g - ref)) / np.max(np.abs(ref)) > 1e-3


def test_weyl_constant_relates_kernel_coefficients():
    b = BasisSpec(1, 1.0, 2, 16)
    c = twisted_heat_coeffs(0.5, b)
    assert c.coeffs[0, 0] * weyl_constant(1, 1.0) == pytest.approx(np.exp(-0.5))


# ---------------------------------------------------------------- holomorphic extension

def test_extension_at_real_points(rng):
    b = BasisSpec(1, 1.0, 6, 16)
    f = hermite_semigroup(0.2, CoeffVector.random(b, rng, terms=5))
    ext = holomorphic_extend(f, PTS)
    assert np.allclose(ext.value, f.evaluate(PTS), atol=1e-12)


def test_extension_of_eigenfunction():
    lam, t = 1.0, 0.3
    b = BasisSpec(1, lam, 6, 16)
    z = np.array([[0.4 + 0.7j], [-1.0 + 0.2j]])
    for k in range(5):
        f = hermite_semigroup(t, CoeffVector.basis_element(b, (k,)))
        want = np.exp(-t * (2 * k + 1) * lam) * eval_hermite((k,), lam, z)
        assert np.allclose(holomorphic_extend(f, z).value, want, rtol=1e-12)


def test_extension_refuses_unsmoothed_truncation():
    b = BasisSpec(1, 1.0, 6, 16)
    raw = twisted_heat_coeffs(0.3, b)
    with pytest.raises(DivergenceError):
        holomorphic_extend(raw, [0.1j, 0.0])
    ext = holomorphic_extend(hermite_semigroup(0.1, raw), [0.1j, 0.0])
    assert ext.tail_bound > 0


# ---------------------------------------------------------------- Laguerre pairings

def test_pairing_ratio_law():
    t, lam = 0.2, 1.0
    I = [laguerre_pairing(k, t, lam) for k in range(4)]
    for k in range(3):
        assert I[k + 1] / I[k] == pytest.approx(np.exp(4 * t * lam), rel=1e-4)


def test_pairing_companion():
    t, lam = 0.2, 1.0
    J = [laguerre_pairing(k, t, lam, imaginary=False) for k in range(4)]
    for k in range(3):
        assert J[k + 1] / J[k] == pytest.approx(np.exp(-4 * t * lam), rel=1e-6)


@pytest.mark.parametrize("t", [0.2, 0.45, 0.8])
def test_pairing_finite_for_all_times(t):
    I = [laguerre_pairing(k, t, 1.0) for k in range(3)]
    assert np.all(np.isfinite(I))
    assert I[1] / I[0] == pytest.approx(np.exp(4 * t), rel=1e-4)
