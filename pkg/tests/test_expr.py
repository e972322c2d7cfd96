from math import pi, sqrt

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from twistfock.expr import ExpressionError, gaussian_moment, parse


@pytest.mark.parametrize("text", ["1", "exp(2*I*xi)", "xi**2*exp(-xi**2/2)", "3*x + exp(-x**2)*(1 + I*x)"])
def test_parse_evaluates_like_numpy(text):
    e = parse(text)
    x = np.linspace(-2, 2, 9)
    ns = {"xi": x, "x": x, "exp": np.exp, "I": 1j}
    assert np.allclose(e(x[:, None]), eval(text, ns) * np.ones_like(x))


def test_two_variables():
    e = parse("exp(xi1*xi2 - xi1**2)", 2)
    X = np.array([[0.3, -0.5], [1.0, 2.0]])
    assert np.allclose(e(X), np.exp(X[:, 0] * X[:, 1] - X[:, 0] ** 2))


@pytest.mark.parametrize("text", ["exp(xi**3)", "sin(xi)", "y + 1", "exp(I*xi**2)", "1/xi", "(("])
def test_outside_grammar(text):
    with pytest.raises(ExpressionError):
        parse(text)


def test_growth_data():
    assert parse("exp(0.3*xi**2) + 1").max_growth() == pytest.approx(0.3)


@given(st.integers(0, 6), st.floats(0.3, 3), st.floats(-2, 2))
def test_gaussian_moment_matches_scipy(p, P, c):
    want = quad(lambda x: x ** p * np.exp(-P * x * x + c * x), -np.inf, np.inf, epsabs=1e-13)[0]
    got = gaussian_moment((p,), [[P]], [c])[0]
    assert got.real == pytest.approx(want, rel=1e-8, abs=1e-10)


def test_gaussian_moment_rejects_divergent():
    with pytest.raises(ExpressionError):
        gaussian_moment((0,), [[-1.0]], [0.0])


def test_fourier_of_gaussian():
    xi = np.array([[0.0], [1.0], [-2.0]])
    got = parse("exp(-x**2)").fourier(xi)
    assert np.allclose(got, sqrt(pi) * np.exp(-xi[:, 0] ** 2 / 4))


def test_complex_moment_two_dimensions():
    P = np.array([[1.0, 0.2], [0.2, 0.5]])
    c = np.array([0.3 + 0.1j, -0.2j])
    got = gaussian_moment((1, 1), P, c)[0]
    Pi = np.linalg.inv(P)
    mu = 0.5 * Pi @ c
    base = pi / sqrt(np.linalg.det(P)) * np.exp(0.25 * c @ Pi @ c)
    assert got == pytest.approx(base * (mu[0] * mu[1] + 0.5 * Pi[0, 1]), rel=1e-12)
