"""Closed-form symbols: finite sums of ``c * xi^p * exp(xi^T A xi + b.xi)``.

The grammar is whatever sympy parses into that shape: polynomials, real
Gaussians and complex exponentials of linear forms, e.g.
``"1"``, ``"exp(2*I*xi)"``, ``"xi**2*exp(-xi**2/2)"``, ``"exp(xi1*xi2 - xi1**2)"``.
Variables are ``xi1..xin`` (``xi`` and ``x`` are aliases for ``xi1``).
Keeping the exponent explicit lets Gaussian integrals be done in closed form
and keeps growth rates of transforms available.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import pi

import numpy as np
import sympy
from scipy.special import roots_hermite


class ExpressionError(ValueError):
    pass


@dataclass(frozen=True)
class GaussianTerm:
    coef: complex
    powers: tuple
    A: np.ndarray
    b: np.ndarray

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=complex)
        mono = np.prod(xi ** np.array(self.powers), axis=1)
        q = np.einsum("ki,ij,kj->k", xi, self.A, xi) + xi @ self.b
        return self.coef * mono * np.exp(q)


def _symbols(n):
    return sympy.symbols(" ".join(f"xi{i + 1}" for i in range(n)), seq=True)


def parse(text, n=1):
    """Parse ``text`` into a :class:`GaussianExpr` on R^n."""
    syms = _symbols(n)
    local = {s.name: s for s in syms}
    local["I"] = sympy.I
    local["i"] = sympy.I
    if n == 1:
        local["xi"] = syms[0]
        local["x"] = syms[0]
    try:
        e = sympy.sympify(str(text), locals=local)
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        raise ExpressionError(f"cannot parse {text!r}: {exc}") from exc
    stray = e.free_symbols - set(syms)
    if stray:
        raise ExpressionError(f"unknown symbols {sorted(map(str, stray))} in {text!r}")
    e = sympy.expand(e, power_exp=False)
    terms = [_term(t, syms, text) for t in sympy.Add.make_args(e) if t != 0]
    return GaussianExpr(n, tuple(terms), str(text))


def _term(t, syms, text):
    n = len(syms)
    coef = sympy.Integer(1)
    powers = [0] * n
    arg = sympy.Integer(0)
    for f in sympy.Mul.make_args(t):
        if f.is_number:
            coef *= f
        elif isinstance(f, sympy.exp) or (f.is_Pow and f.base == sympy.E):
            arg += f.exp if f.is_Pow else f.args[0]
        elif f in syms:
            powers[syms.index(f)] += 1
        elif f.is_Pow and f.base in syms and f.exp.is_Integer and f.exp > 0:
            powers[syms.index(f.base)] += int(f.exp)
        else:
            raise ExpressionError(f"factor {f} of {text!r} is outside the grammar")
    arg = sympy.expand(arg)
    try:
        poly = sympy.Poly(arg, *syms)
    except sympy.PolynomialError as exc:
        raise ExpressionError(f"exponent {arg} is not polynomial") from exc
    if poly.total_degree() > 2:
        raise ExpressionError(f"exponent {arg} has degree > 2")
    A = np.zeros((n, n))
    b = np.zeros(n, dtype=complex)
    c0 = 0j
    for monom, c in poly.terms():
        c = complex(sympy.N(c))
        deg = sum(monom)
        if deg == 0:
            c0 += c
        elif deg == 1:
            b[monom.index(1)] += c
        else:
            if abs(c.imag) > 0:
                raise ExpressionError("quadratic part of the exponent must be real")
            idx = [i for i, m in enumerate(monom) for _ in range(m)]
            i, j = idx
            if i == j:
                A[i, i] += c.real
            else:
                A[i, j] += c.real / 2
                A[j, i] += c.real / 2
    return GaussianTerm(complex(sympy.N(coef)) * np.exp(c0), tuple(powers), A, b)


def gaussian_moment(powers, P, c, order=None):
    """``int x^p exp(-x^T P x + c.x) dx`` over R^n, exactly.

    ``P`` real symmetric positive definite, ``c`` complex (vector or (K, n)).
    The exponential factor is done in closed form; the polynomial moment of the
    shifted Gaussian by Gauss-Hermite, which is exact for polynomials.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    n = P.shape[0]
    c = np.atleast_2d(np.asarray(c, dtype=complex))
    try:
        L = np.linalg.cholesky(P)
    except np.linalg.LinAlgError as exc:
        raise ExpressionError("Gaussian integral diverges (form not positive definite)") from exc
    Pinv = np.linalg.inv(P)
    mu = 0.5 * c @ Pinv
    base = pi ** (n / 2.0) / np.prod(np.diag(L)) * np.exp(0.25 * np.einsum("ki,ij,kj->k", c, Pinv, c))
    deg = sum(powers)
    if deg == 0:
        return base
    q = order or deg // 2 + 1
    t, w = roots_hermite(q)
    # x = mu + L^{-T} s with weight exp(-|s|^2)
    M = np.linalg.inv(L).T
    grids = np.meshgrid(*[t] * n, indexing="ij")
    S = np.stack([g.ravel() for g in grids], axis=1)
    W = np.prod(np.stack(np.meshgrid(*[w] * n, indexing="ij"), axis=0).reshape(n, -1), axis=0)
    X = mu[:, None, :] + (S @ M.T)[None, :, :]
    mono = np.prod(X ** np.array(powers), axis=2)
    return base * (mono @ W) / pi ** (n / 2.0)


@dataclass(frozen=True)
class GaussianExpr:
    n: int
    terms: tuple
    source: str = ""

    def __call__(self, xi):
        xi = np.atleast_2d(np.asarray(xi, dtype=complex))
        if xi.shape[1] != self.n and self.n == 1:
            xi = xi.reshape(-1, 1)
        out = np.zeros(xi.shape[0], dtype=complex)
        for t in self.terms:
            out += t(xi)
        return out

    def max_growth(self):
        """Largest eigenvalue of the quadratic exponent over all terms."""
        return max((float(np.max(np.linalg.eigvalsh(t.A))) for t in self.terms), default=-np.inf)

    def gauss_bargmann(self, z):
        """``e^{z^2/4} int m(xi) e^{i z.xi} e^{-|xi|^2} dxi`` in closed form."""
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        out = np.zeros(z.shape[0], dtype=complex)
        eye = np.eye(self.n)
        for t in self.terms:
            out += t.coef * gaussian_moment(t.powers, eye - t.A, t.b[None, :] + 1j * z)
        return out * np.exp(0.25 * np.sum(z * z, axis=1))

    def curly_g(self, z):
        """``pi^{n/2} int f(x) e^{z.x/2 - |x|^2/4} dx``, which equals G applied to the Fourier transform."""
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        out = np.zeros(z.shape[0], dtype=complex)
        q = 0.25 * np.eye(self.n)
        for t in self.terms:
            out += t.coef * gaussian_moment(t.powers, q - t.A, t.b[None, :] + 0.5 * z)
        return pi ** (self.n / 2.0) * out

    def fourier(self, xi):
        """``int f(x) e^{-i x.xi} dx`` in closed form."""
        xi = np.atleast_2d(np.asarray(xi, dtype=complex))
        out = np.zeros(xi.shape[0], dtype=complex)
        for t in self.terms:
            out += t.coef * gaussian_moment(t.powers, -t.A, t.b[None, :] - 1j * xi)
        return out

    def bargmann_growth(self):
        """Quadratic/linear exponents ``(A, beta)`` of ``G(m)(z)`` per term.

        ``G(m)(z) ~ poly(z) exp(z^T A z + beta.z)`` with
        ``A = (I - (I - A_m)^{-1}) / 4`` and ``beta = (i/2)(I - A_m)^{-1} b``.
        """
        eye = np.eye(self.n)
        out = []
        for t in self.terms:
            Pinv = np.linalg.inv(eye - t.A)
            out.append((0.25 * (eye - Pinv), 0.5j * Pinv @ t.b))
        return out

    def curly_growth(self):
        out = []
        for t in self.terms:
            Pinv = np.linalg.inv(0.25 * np.eye(self.n) - t.A)
            out.append((Pinv / 16.0, 0.25 * Pinv @ t.b))
        return out
