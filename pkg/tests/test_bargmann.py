from math import pi, sqrt

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from twistfock.bargmann import (
    ConditionViolatedError,
    EntireFunction,
    SymbolSpec,
    apply_convolution_operator,
    curly_g,
    fock_action,
    fock_kernel_gram_norm,
    fock_kernel_span,
    fock_norm,
    gauss_bargmann,
    gauss_bargmann_function,
    multiplier_action,
    plancherel_sides,
    recover_multiplier,
    reproducing_kernel,
    twisted_gauss_bargmann,
    twisted_gauss_bargmann_function,
    twisted_identity_symbol,
    twisted_inner,
    twisted_kernel_span,
    w_lambda,
)
from twistfock.expr import parse
from twistfock.heisen import CoeffVector, OperatorMatrix, weyl_from_coeffs
from twistfock.quad import gauss_hermite, tree_sum
from twistfock.specfun import BasisSpec

Z = np.array([[0.0], [1.0], [0.5 + 0.5j], [-1.2 + 0.3j], [2j]])


# ---------------------------------------------------------------- classical transform

def test_transform_of_one_is_constant():
    assert np.allclose(gauss_bargmann(parse("1"), Z), sqrt(pi), rtol=1e-14)
    # quadrature route on a plain callable
    assert np.allclose(gauss_bargmann(lambda x: np.ones(len(x)), Z, 1), sqrt(pi), rtol=1e-12)


@pytest.mark.parametrize("a", [0.0, 0.7, -1.5])
def test_transform_of_character(a):
    want = sqrt(pi) * np.exp(Z[:, 0] ** 2 / 4) * np.exp(-((Z[:, 0] + a) ** 2) / 4)
    closed = gauss_bargmann(parse(f"exp(I*{a}*xi)"), Z)
    quad = gauss_bargmann(lambda x: np.exp(1j * a * x[:, 0]), Z, 1)
    assert np.allclose(closed, want, rtol=1e-12)
    assert np.allclose(quad, want, rtol=1e-10)


def test_closed_and_quadrature_routes_agree():
    m = parse("(1 + x)*exp(-x**2/3) + x**2")
    f = lambda x: (1 + x[:, 0]) * np.exp(-x[:, 0] ** 2 / 3) + x[:, 0] ** 2
    assert np.allclose(gauss_bargmann(m, Z), gauss_bargmann(f, Z, 1), rtol=1e-10)


def test_translation_law():
    # m(xi - a/2) e^{-|xi|^2} is recovered from shifted slices; check on a character
    phi = gauss_bargmann_function(parse("exp(0.7*I*xi)"))
    for a, xi in [(0.3, 0.1), (-1.2, 0.8), (1.5, -0.4)]:
        got = recover_multiplier(phi, [a], [[xi]])[0]
        assert got == pytest.approx(np.exp(0.7j * (xi - a / 2)) * np.exp(-xi * xi), abs=1e-8)


def test_recover_constant_multiplier(rng):
    phi = gauss_bargmann_function(parse("1"))
    for _ in range(10):
        a, xi = rng.normal(size=1) * 1.5, rng.normal(size=(1, 1))
        got = recover_multiplier(phi, a, xi)[0]
        assert got == pytest.approx(np.exp(-xi[0, 0] ** 2), abs=1e-8)


def test_recover_refuses_fast_growth():
    phi = EntireFunction(lambda p: np.exp(0.3 * p[:, 0] ** 2), 1, 0.0, [(np.array([[0.3]]), np.zeros(1))])
    with pytest.raises(ConditionViolatedError):
        recover_multiplier(phi, [0.0], [[0.0]])
    undeclared = EntireFunction(lambda p: np.exp(0.3 * p[:, 0] ** 2), 1)
    with pytest.raises(ConditionViolatedError):
        recover_multiplier(undeclared, [0.0], [[0.0]])


def test_unitary_up_to_constant(rng):
    g = gauss_hermite(32)
    ratios = []
    for _ in range(5):
        c = rng.normal(size=4) + 1j * rng.normal(size=4)
        m = parse(" + ".join(f"({float(v.real)!r} + {float(v.imag)!r}*I)*xi**{k}" for k, v in enumerate(c)))
        mass = tree_sum(g.weights * np.abs(m(g.nodes)) ** 2).real
        ratios.append(fock_norm(gauss_bargmann_function(m)) / mass)
    assert np.ptp(ratios) / np.mean(ratios) < 1e-3


def test_curly_g_of_narrow_gaussian():
    s = 0.01
    f = parse(f"exp(-x**2/{s * s})*{(pi * s * s) ** -0.5}")
    z = np.array([[0.0], [0.5], [0.3j]])
    assert np.allclose(f.curly_g(z), sqrt(pi), rtol=1e-3)


def test_curly_g_routes(rng):
    b = BasisSpec(1, 1.0, 6, 32)
    c = CoeffVector.random(b, rng, "hermite", terms=4)
    z = np.array([[0.2 + 0.1j], [-0.5 + 0.4j]])
    via_fourier = curly_g(c, z)
    direct = curly_g(lambda x: c.evaluate(x), z, 1)
    assert np.allclose(via_fourier, direct, rtol=1e-9)


def test_plancherel_ratio_is_independent_of_y():
    f = parse("exp(-x**2/2)*(1 + x)")
    ratios = [np.divide(*plancherel_sides(f, [y])) for y in (-2, -1, 0, 1, 2)]
    assert np.allclose(ratios, 2 * pi, rtol=1e-3)


# ---------------------------------------------------------------- Fock-space action

def test_zero_translation_is_identity():
    phi = gauss_bargmann_function(parse("x*exp(-x**2/4)"))
    assert np.allclose(fock_action([0.0], phi)(Z), phi(Z))


def test_intertwining_constant_multiplier():
    w = np.array([1j])
    one = lambda x: np.ones(len(x))
    lhs = fock_action(w, gauss_bargmann_function(parse("1")))(Z)
    rhs = gauss_bargmann(multiplier_action(w, one), Z, 1)
    assert np.allclose(lhs, rhs, rtol=1e-8, atol=1e-12)


@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_action_is_unitary_on_kernel_span(u, v):
    centers = np.array([[0.5 + 0.2j], [-0.3 + 1j], [1.1 - 0.4j]])
    coeffs = np.array([1.0, -0.5 + 0.3j, 0.7j])
    w = np.array([u + 1j * v])
    F = fock_kernel_span(coeffs, centers)
    # rho(w) K_b = (phase) K_{b'}: read the new span off the formula
    c = np.exp(-0.25 * abs(w[0]) ** 2)
    new_coeffs = coeffs * c * np.exp(0.5 * w[0] * np.conj(centers[:, 0]))
    new_centers = centers - w[None, :]
    G = fock_kernel_span(new_coeffs, new_centers)
    assert np.allclose(fock_action(w, F)(Z), G(Z), rtol=1e-12)
    assert fock_kernel_gram_norm(new_coeffs, new_centers) == pytest.approx(
        fock_kernel_gram_norm(coeffs, centers), rel=1e-10)


def test_fock_norm_matches_gram():
    centers = np.array([[0.5 + 0.2j], [-0.3 + 1j]])
    coeffs = np.array([1.0, -0.5 + 0.3j])
    assert fock_norm(fock_kernel_span(coeffs, centers)) == pytest.approx(
        fock_kernel_gram_norm(coeffs, centers), rel=1e-8)


# ---------------------------------------------------------------- convolution operators

def test_classical_operator_multiplier_algebra():
    a = 0.6
    z = np.array([[0.2], [0.4 + 0.3j], [-0.5], [0.1 - 0.2j], [0.8j]])
    phi = gauss_bargmann_function(parse(f"exp(I*{a}*xi)"))
    F = gauss_bargmann_function(parse("1"))
    got = apply_convolution_operator(phi, F, 0, z)
    want = gauss_bargmann(parse(f"exp(I*{a}*xi)"), z)
    r = got / want
    assert np.max(np.abs(r - r[0])) / abs(r[0]) < 1e-4


def test_constant_symbol_acts_as_scalar():
    z = np.array([[0.2], [0.4 + 0.3j], [-0.5]])
    phi = gauss_bargmann_function(parse("1"))
    F = gauss_bargmann_function(parse("x*exp(-x**2/2)"))
    r = apply_convolution_operator(phi, F, 0, z) / F(z)
    assert np.max(np.abs(r - r[0])) / abs(r[0]) < 1e-6


def test_operator_on_zero():
    zero = EntireFunction(lambda p: np.zeros(len(p), dtype=complex), 1)
    phi = gauss_bargmann_function(parse("1"))
    assert np.all(apply_convolution_operator(phi, zero, 0, Z[:2]) == 0)


# ---------------------------------------------------------------- twisted transform

def test_twisted_transform_of_zero():
    b = BasisSpec(1, 1.0, 6, 32)
    pts = np.array([[0.1, 0.2], [0.3j, -0.5]])
    assert np.all(twisted_gauss_bargmann(OperatorMatrix.zeros(b), pts).values == 0)


def test_twisted_routes_on_rank_one(rng):
    b = BasisSpec(1, 1.0, 12, 64)
    pts = rng.normal(size=(5, 2))
    M = OperatorMatrix.rank_one(b)
    t = twisted_gauss_bargmann(M, pts).values
    d = twisted_gauss_bargmann(M, pts, "density").values
    assert np.allclose(t, d, rtol=1e-6)


def test_twisted_routes_at_complex_points(rng):
    b = BasisSpec(1, 1.0, 12, 64)
    pts = (rng.normal(size=(5, 2)) + 1j * rng.normal(size=(5, 2))) * 0.7
    M = weyl_from_coeffs(CoeffVector.random(b, rng, terms=6, max_degree=5))
    t = twisted_gauss_bargmann(M, pts).values
    d = twisted_gauss_bargmann(M, pts, "density").values
    assert np.max(np.abs(t - d)) / np.max(np.abs(d)) < 1e-5


@given(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False))
def test_twisted_linearity(c):
    b = BasisSpec(1, 1.0, 6, 32)
    M = weyl_from_coeffs(CoeffVector.random(b, np.random.default_rng(3), terms=4))
    pts = np.array([[0.2, -0.1j], [0.5 + 0.5j, 0.3]])
    assert np.allclose(twisted_gauss_bargmann(M * c, pts).values,
                       c * twisted_gauss_bargmann(M, pts).values, rtol=1e-12, atol=1e-12)


def test_twisted_transform_of_identity():
    b = BasisSpec(1, 1.0, 24, 64)
    pts = np.array([[0.0, 0.0], [0.3, -0.2], [0.2j, 0.1]])
    v = twisted_gauss_bargmann(OperatorMatrix.identity(b), pts)
    assert np.allclose(v.values, twisted_identity_symbol(b)(pts), rtol=1e-8)
    assert np.allclose(v.values, 2 * pi, rtol=1e-8)


def test_symbol_spec_round_trip(rng):
    b = BasisSpec(1, 1.0, 6, 32)
    f = CoeffVector.random(b, rng, terms=3)
    s = SymbolSpec("density", f, 1.0, 1)
    pts = np.array([[0.1, 0.2]])
    assert np.allclose(s.entire()(pts), twisted_gauss_bargmann_function(weyl_from_coeffs(f))(pts))


@pytest.mark.parametrize("kind,lam", [("operator", 0.0), ("multiplier", 1.0), ("bogus", 0.0)])
def test_symbol_spec_validation(kind, lam):
    with pytest.raises(ValueError):
        SymbolSpec(kind, None, lam, 1)


# ---------------------------------------------------------------- twisted Fock space

def test_kernel_on_real_diagonal():
    lam = 0.8
    zeta = np.array([0.3, -1.1])
    want = np.exp(0.5 * lam / np.tanh(lam) * zeta @ zeta)
    assert reproducing_kernel(lam, zeta, zeta) == pytest.approx(want, rel=1e-14)


def test_kernel_hermitian(rng):
    lam = 1.0
    for _ in range(5):
        a = rng.normal(size=2) + 1j * rng.normal(size=2)
        b = rng.normal(size=2) + 1j * rng.normal(size=2)
        assert reproducing_kernel(lam, a, b) == pytest.approx(np.conj(reproducing_kernel(lam, b, a)), rel=1e-12)


def test_reproducing_property():
    lam = 1.0
    centers = np.array([[0.3 + 0.1j, -0.2], [0.5j, 0.4 - 0.2j], [-0.6, 0.1j]])
    coeffs = np.array([1.0, 0.5 - 0.5j, -0.7j])
    F = twisted_kernel_span(lam, coeffs, centers)
    for b in centers:
        Kb = twisted_kernel_span(lam, [1.0], [b])
        got = twisted_inner(lam, F, Kb)
        assert got == pytest.approx(F(b[None, :])[0], rel=1e-4)


def test_weight_is_positive():
    z = np.array([[0.3 + 0.1j, -0.2], [1j, 2.0]])
    assert np.all(w_lambda(1.0, z) > 0)
