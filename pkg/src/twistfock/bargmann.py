"""Gauss-Bargmann transforms, Fock-space actions and convolution operators.

Classical objects live on C^n (points as complex arrays (K, n)); twisted
objects on C^{2n} with ``zeta = (z, w)`` (complex arrays (K, 2n)). Real
coordinates of a point of C^d are ``X = (Re zeta, Im zeta)`` in R^{2d}.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from math import pi

import numpy as np

from .expr import GaussianExpr
from .heisen import (
    AccuracyWarning,
    CoeffVector,
    OperatorMatrix,
    coeffs_from_weyl,
    hs_constant,
    symplectic_form,
)
from .quad import gauss_hermite, gaussian_grid, tensor_grid, tree_sum
from .semigrp import hermite_semigroup, twisted_heat_kernel
from .specfun import BasisSpec, as_points, hermite_basis_values, matrix_elements

GB_ORDER = 64
RESIDUAL_TOL = 1e-8


class ConditionViolatedError(ArithmeticError):
    """The integrability condition needed by an inversion fails on the window."""


@dataclass
class EntireFunction:
    """An entire function on C^dim.

    ``growth`` optionally lists ``(A, beta)`` with ``|F(z)| <~ |exp(z^T A z + beta.z)|``
    up to polynomial factors, one pair per term. Weighted norms use it to
    place quadrature nodes and to detect divergence.
    """

    fn: object
    dim: int
    tail_bound: float = 0.0
    growth: list | None = None
    label: str = ""

    def __call__(self, points):
        pts = as_points(points, self.dim)
        return np.asarray(self.fn(pts))

    def log_form(self):
        """Real quadratic/linear data of ``log|F(xi + i eta)|`` per term.

        For ``F ~ exp(z^T A z + beta.z)`` this is ``X^T K X + k.X`` with
        ``K = [[Re A, -Im A], [-Im A, -Re A]]`` and ``k = (Re beta, -Im beta)``.
        """
        if self.growth is None:
            return None
        out = []
        for A, beta in self.growth:
            A = np.asarray(A, dtype=complex)
            K = np.block([[A.real, -A.imag], [-A.imag, -A.real]])
            beta = np.asarray(beta, dtype=complex)
            out.append((K, np.concatenate([beta.real, -beta.imag])))
        return out

    def scaled(self, c):
        return EntireFunction(lambda p: c * self.fn(p), self.dim, abs(c) * self.tail_bound, self.growth, self.label)


@dataclass
class SymbolSpec:
    """A symbol for the classifier and the CLI.

    ``kind`` is one of ``multiplier`` (m on R^n, lam = 0), ``density`` (f on
    R^n for lam = 0 or a special Hermite expansion for lam != 0), ``operator``
    (an OperatorMatrix, lam != 0) or ``entire`` (an EntireFunction).
    """

    kind: str
    payload: object
    lam: float = 0.0
    n: int = 1
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("multiplier", "density", "operator", "entire"):
            raise ValueError(f"unknown symbol kind {self.kind!r}")
        if self.lam == 0 and self.kind == "operator":
            raise ValueError("operator symbols need lambda != 0")
        if self.lam != 0 and self.kind == "multiplier":
            raise ValueError("multiplier symbols are classical (lambda = 0)")

    def entire(self):
        """The symbol phi as an EntireFunction."""
        if self.kind == "entire":
            return self.payload
        if self.lam == 0:
            if self.kind == "multiplier":
                return gauss_bargmann_function(self.payload, self.n)
            return curly_g_function(self.payload, self.n)
        M = self.operator()
        return twisted_gauss_bargmann_function(M)

    def operator(self):
        if self.kind == "operator":
            return self.payload
        if self.kind == "density" and self.lam != 0:
            from .heisen import weyl_from_coeffs

            return weyl_from_coeffs(self.payload)
        return None


# --------------------------------------------------------------------------
# classical Gauss-Bargmann transform

def gauss_bargmann(m, points, n=None, order=GB_ORDER, check=True):
    """``Gm(z) = e^{z^2/4} int m(xi) e^{i z.xi} e^{-|xi|^2} dxi``.

    ``m`` is a :class:`GaussianExpr` (closed form) or a vectorised callable on
    R^n (Gauss-Hermite, nodes centred at ``-Im z / 2`` where the integrand
    peaks). For callables a second rule of higher order gives a residual;
    exceeding ``RESIDUAL_TOL`` raises an :class:`AccuracyWarning`.
    """
    if isinstance(m, GaussianExpr):
        return m.gauss_bargmann(as_points(points, m.n))
    pts = as_points(points, n)
    n = pts.shape[1]
    vals = _gb_quadrature(m, pts, order)
    if check:
        resid = np.max(np.abs(vals - _gb_quadrature(m, pts, order + 16)), initial=0.0)
        if resid > RESIDUAL_TOL * max(1.0, np.max(np.abs(vals), initial=0.0)):
            warnings.warn(f"Gauss-Bargmann quadrature residual {resid:.3g}", AccuracyWarning, stacklevel=2)
    return vals


def _gb_quadrature(m, pts, order):
    n = pts.shape[1]
    base = tensor_grid(*[gauss_hermite(order)] * n)
    out = np.empty(len(pts), dtype=complex)
    for k, z in enumerate(pts):
        xi = base.nodes - 0.5 * z.imag[None, :]
        integrand = m(xi) * np.exp(1j * xi @ z - np.sum(xi * xi, axis=1))
        out[k] = np.exp(0.25 * np.sum(z * z)) * tree_sum(base.plain_weights * integrand)
    return out


def gauss_bargmann_function(m, n=1, order=GB_ORDER):
    if isinstance(m, GaussianExpr):
        return EntireFunction(m.gauss_bargmann, m.n, 0.0, m.bargmann_growth(), f"G({m.source})")
    return EntireFunction(lambda p: gauss_bargmann(m, p, n, order, check=False), n, 0.0, None, "G(m)")


def hermite_fourier(f, xi):
    """Fourier transform ``int f(x) e^{-i x.xi} dx`` of a Hermite expansion.

    Uses ``FT[h_k](s) = sqrt(2 pi) (-i)^k h_k(s)`` with the scaling of the basis.
    """
    b = f.basis
    a = abs(b.lam)
    pts = as_points(xi, b.n)
    phase = (-1j) ** b.degrees
    scaled = BasisSpec(b.n, 1.0 / a, b.max_degree, b.quad_order)
    vals = hermite_basis_values(scaled, pts)
    return (2 * pi / a) ** (b.n / 2.0) * ((phase * f.coeffs) @ vals)


def curly_g(f, points, n=None, order=GB_ORDER):
    """``G(f^)``, the Gauss-Bargmann transform of the Fourier transform of f.

    Computed as ``pi^{n/2} int f(x) e^{z.x/2 - |x|^2/4} dx``, which is the
    same thing after doing the xi integral. Accepts a GaussianExpr, a
    Hermite CoeffVector or a vectorised callable on R^n.
    """
    if isinstance(f, GaussianExpr):
        return f.curly_g(as_points(points, f.n))
    if isinstance(f, CoeffVector):
        return gauss_bargmann(lambda xi: hermite_fourier(f, xi), points, f.basis.n, order, check=False)
    pts = as_points(points, n)
    n = pts.shape[1]
    base = tensor_grid(*[gauss_hermite(order, 0.25)] * n)
    out = np.empty(len(pts), dtype=complex)
    for k, z in enumerate(pts):
        x = base.nodes + z.real[None, :]
        out[k] = tree_sum(base.plain_weights * f(x) * np.exp(0.5 * x @ z - 0.25 * np.sum(x * x, axis=1)))
    return pi ** (n / 2.0) * out


def curly_g_function(f, n=1):
    if isinstance(f, GaussianExpr):
        return EntireFunction(f.curly_g, f.n, 0.0, f.curly_growth(), f"curlyG({f.source})")
    dim = f.basis.n if isinstance(f, CoeffVector) else n
    return EntireFunction(lambda p: curly_g(f, p, dim), dim, 0.0, None, "curlyG(f)")


def h_space_norm(f, order=GB_ORDER):
    """``(2 pi)^{-n} int |f^(xi)|^2 e^{-|xi|^2} dxi``, the squared norm of f * q_{1/2}.

    Returns ``(value, residual)``; a large residual means f^ is not in
    L^2(dgamma) at the resolution of the rule.
    """
    n = f.n
    def run(q):
        g = tensor_grid(*[gauss_hermite(q)] * n)
        return tree_sum(g.weights * np.abs(f.fourier(g.nodes)) ** 2).real / (2 * pi) ** n

    v = run(order)
    return v, abs(v - run(order + 16))


def heat_smoothed_norm(f, order=GB_ORDER):
    """``|f * q_{1/2}|_2^2`` computed in space: inner convolution, outer L^2."""
    from .semigrp import heat_kernel

    n = f.n
    inner = tensor_grid(*[gauss_hermite(order, 0.5)] * n)
    outer = tensor_grid(*[gauss_hermite(order, 0.25)] * n)
    vals = np.empty(len(outer), dtype=complex)
    for k, x in enumerate(outer.nodes):
        y = inner.nodes
        vals[k] = tree_sum(inner.plain_weights * f(y) * heat_kernel(0.5, x[None, :] - y, n))
    return tree_sum(outer.plain_weights * np.abs(vals) ** 2).real


def recover_multiplier(phi, a, xi, order=GB_ORDER, decay_tol=1e-6):
    """``m(xi - a/2) e^{-|xi|^2} = (2 pi)^{-n} int phi(x + ia) e^{-|x|^2/4} e^{-i x.xi} dx``.

    Raises :class:`ConditionViolatedError` if ``phi(x + ia) e^{-|x|^2/4}`` is not
    integrable on the window: either the declared growth beats the weight
    or the integrand is still large at the outermost nodes.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    n = len(a)
    if phi.growth is not None:
        for A, _ in phi.growth:
            if np.max(np.linalg.eigvalsh(np.real(A))) >= 0.25:
                raise ConditionViolatedError("phi grows at least like the weight e^{|x|^2/4}")
    g = tensor_grid(*[gauss_hermite(order, 0.25)] * n)
    x = g.nodes
    vals = phi(x + 1j * a[None, :]) * np.exp(-0.25 * np.sum(x * x, axis=1))
    scale = np.max(np.abs(vals), initial=0.0)
    edge = np.max(np.abs(x), axis=1) >= np.max(np.abs(x)) - 1e-12
    if scale > 0 and np.max(np.abs(vals[edge])) > decay_tol * scale:
        raise ConditionViolatedError("integrand does not decay inside the quadrature window")
    phase = np.exp(-1j * xi @ x.T)
    return (phase * (g.plain_weights * vals)[None, :]).sum(axis=1) / (2 * pi) ** n


def plancherel_sides(f, y, order=GB_ORDER):
    """Both sides of the y-slice Plancherel identity for ``phi = G(f^)``.

    ``lhs = int |phi(x + iy)|^2 e^{-(|x|^2 - |y|^2)/2} dx`` and
    ``rhs = int |f^(xi)|^2 e^{-2|xi|^2} e^{-2 y.xi} dxi``; the ratio is
    ``(2 pi)^n`` for every y.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    n = f.n
    K = max((np.max(np.linalg.eigvalsh(A.real)) for A, _ in f.curly_growth()), default=0.0)
    px = 0.5 - 2 * K
    if px <= 0:
        raise ConditionViolatedError("phi grows too fast for the slice integral")
    gx = gaussian_grid(order, px * np.eye(n))
    z = gx.nodes + 1j * y[None, :]
    lhs = tree_sum(gx.plain_weights * np.abs(f.curly_g(z)) ** 2
                   * np.exp(-0.5 * (np.sum(gx.nodes ** 2, axis=1) - y @ y))).real
    gxi = gaussian_grid(order, 2.0 * np.eye(n), -0.5 * y)
    s = gxi.nodes
    rhs = tree_sum(gxi.plain_weights * np.abs(f.fourier(s)) ** 2
                   * np.exp(-2 * np.sum(s * s, axis=1) - 2 * s @ y)).real
    return lhs, rhs


# --------------------------------------------------------------------------
# Fock-space actions

def fock_action(w, phi):
    """``rho(w) phi(z) = e^{-|w|^2/4} phi(z + w) e^{-z.conj(w)/2}``."""
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    c = np.exp(-0.25 * np.vdot(w, w).real)

    def fn(z):
        return c * phi(z + w[None, :]) * np.exp(-0.5 * z @ np.conj(w))

    return EntireFunction(fn, phi.dim, c * phi.tail_bound, None, f"rho({phi.label})")


def multiplier_action(w, m):
    """The multiplier side of ``rho(w)``: ``rho(w) G(m) = G(pi(w) m)``.

    ``pi(u + iv) m(xi) = e^{-|v|^2/2 - i u.v/2} m(xi - v) e^{i xi.conj(w)}``.
    """
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    u, v = w.real, w.imag
    c = np.exp(-0.5 * v @ v - 0.5j * u @ v)

    def fn(xi):
        xi = np.atleast_2d(xi)
        return c * m(xi - v[None, :]) * np.exp(1j * xi @ np.conj(w))

    return fn


def fock_kernel_span(coeffs, centers):
    """``F(z) = sum_j c_j exp(z.conj(b_j)/2)``: kernel functions of F(C^n)."""
    coeffs = np.asarray(coeffs, dtype=complex)
    centers = np.atleast_2d(np.asarray(centers, dtype=complex))

    def fn(z):
        return np.exp(0.5 * z @ np.conj(centers).T) @ coeffs

    n = centers.shape[1]
    growth = [(np.zeros((n, n)), 0.5 * np.conj(b)) for b in centers]
    return EntireFunction(fn, n, 0.0, growth, "kernel span")


def fock_kernel_gram_norm(coeffs, centers):
    """Squared norm of a kernel span from the Gram matrix ``exp(b_i.conj(b_j)/2)``."""
    c = np.asarray(coeffs, dtype=complex)
    b = np.atleast_2d(np.asarray(centers, dtype=complex))
    G = np.exp(0.5 * b @ np.conj(b).T)
    return float(np.real(np.conj(c) @ G @ c))


def fock_norm(F, order=48, precision=0.5):
    """``(2 pi)^{-n} int |F(z)|^2 e^{-|z|^2/2} dz`` over C^n.

    The rule is centred at the peak of the integrand, estimated from the
    log-modulus at a few points.
    """
    n = F.dim

    def logmod(X):
        return 2 * np.log(np.abs(F(X[:, :n] + 1j * X[:, n:])) + 1e-300) - 0.5 * np.sum(X * X, axis=1)

    center = _peak(logmod, 2 * n, precision * np.eye(2 * n))
    g = gaussian_grid(order, precision * np.eye(2 * n), center)
    X = g.nodes
    vals = np.abs(F(X[:, :n] + 1j * X[:, n:])) ** 2 * np.exp(-0.5 * np.sum(X * X, axis=1))
    return tree_sum(g.plain_weights * vals).real / (2 * pi) ** n


def _peak(logmod, d, P, h=0.5):
    """Newton step for the peak of ``exp(logmod)`` assuming Hessian ``-2P``."""
    E = np.vstack([np.zeros(d), h * np.eye(d), -h * np.eye(d)])
    L = logmod(E)
    if not np.all(np.isfinite(L)) or np.any(L < -600):
        return np.zeros(d)
    grad = (L[1:d + 1] - L[d + 1:]) / (2 * h)
    return np.linalg.solve(2 * P, grad)


# --------------------------------------------------------------------------
# noncommutative Gauss-Bargmann transform

@dataclass
class TransformValue:
    values: np.ndarray
    tail_bound: np.ndarray


def _damped(M):
    b = M.basis
    d = np.exp(-0.5 * (2 * b.degrees + b.n) * abs(b.lam))
    return d[:, None] * M.entries * d[None, :]


def twisted_gauss_bargmann(M, points, route="trace", chunk=4096):
    """``G_lam(M)(zeta) = p_1(zeta)^{-1} tr(pi_lam(-zeta) e^{-H/2} M e^{-H/2})``.

    ``route="trace"`` sums ``A[b, a] (pi_lam(-zeta) Phi_b, Phi_a)`` over the
    truncated basis with complexified matrix elements; the tail bound is the
    mass of the outermost shell. ``route="density"`` writes ``M = pi_lam(f)``
    and returns ``(2 pi/|lam|)^n p_1^{-1} (e^{-H/2} f)(zeta)``.
    """
    b = M.basis
    n = b.n
    pts = as_points(points, 2 * n)
    p1 = twisted_heat_kernel(1.0, b.lam, pts, n) if len(pts) else np.zeros(0)
    if route == "density":
        f = coeffs_from_weyl(M)
        g = hermite_semigroup(0.5, f)
        return TransformValue(hs_constant(n, b.lam) * g.evaluate(pts) / p1, np.zeros(len(pts)))
    if route != "trace":
        raise ValueError(f"unknown route {route!r}")
    A = _damped(M)
    outer = (b.degrees[:, None] == b.max_degree) | (b.degrees[None, :] == b.max_degree)
    vals = np.empty(len(pts), dtype=complex)
    tail = np.empty(len(pts))
    for s in range(0, len(pts), chunk):
        P = -pts[s:s + chunk]
        E = matrix_elements(b.indices, b.indices, b.lam, P[:, :n], P[:, n:])
        # tr(pi(-zeta) A) = sum_{a,b} A[b, a] E_{b a}(-zeta)
        terms = A[:, :, None] * E
        vals[s:s + chunk] = terms.sum(axis=(0, 1))
        tail[s:s + chunk] = np.abs(terms[outer]).sum(axis=0)
    return TransformValue(vals / p1, tail / np.abs(p1))


def twisted_growth(lam, n):
    a = abs(lam)
    A = 0.25 * (a / np.tanh(a) - a) * np.eye(2 * n)
    return [(A, np.zeros(2 * n))]


def twisted_gauss_bargmann_function(M, route="trace"):
    b = M.basis

    def fn(p):
        return twisted_gauss_bargmann(M, p, route).values

    tail = float(np.abs(_damped(M)).sum()) if b.max_degree else 0.0
    return EntireFunction(fn, 2 * b.n, tail, twisted_growth(b.lam, b.n), "G_lam(M)")


def reproducing_kernel(lam, zeta, zeta_p):
    """``K(zeta, zeta') = exp(lam coth(lam)/2 zeta'.conj(zeta)) exp(-i lam/2 [zeta', conj(zeta)])``."""
    z = np.atleast_2d(np.asarray(zeta, dtype=complex))
    zp = np.atleast_2d(np.asarray(zeta_p, dtype=complex))
    c = lam / np.tanh(lam)
    zb = np.conj(z)
    out = np.exp(0.5 * c * np.sum(zp * zb, axis=1)) * np.exp(-0.5j * lam * symplectic_form(zp, zb))
    return out[0] if out.shape == (1,) else out


def w_lambda_constant(lam, n):
    """Normalisation making the reproducing formula hold with constant 1."""
    a = abs(lam)
    return (a / (2 * pi * np.sinh(a))) ** (2 * n)


def w_lambda_form(lam, n):
    """Matrix W with ``w_lam = c exp(-X^T W X)``, X = (Re zeta, Im zeta) in R^{4n}."""
    c = 0.5 * lam / np.tanh(lam)
    W = c * np.eye(4 * n)
    # exponent lam [Re zeta, Im zeta] = lam (u.y - v.x); coordinates (x, u, y, v)
    for i in range(n):
        x, u, y, v = i, n + i, 2 * n + i, 3 * n + i
        W[u, y] = W[y, u] = -0.5 * lam
        W[v, x] = W[x, v] = 0.5 * lam
    return W


def w_lambda(lam, zeta):
    """Weight of the twisted Fock space at points zeta in C^{2n}."""
    z = np.atleast_2d(np.asarray(zeta, dtype=complex))
    n = z.shape[1] // 2
    X = np.concatenate([z.real, z.imag], axis=1)
    W = w_lambda_form(lam, n)
    return w_lambda_constant(lam, n) * np.exp(-np.einsum("ki,ij,kj->k", X, W, X))


def twisted_kernel_span(lam, coeffs, centers):
    """``F(zeta) = sum_j c_j K(b_j, zeta)``, holomorphic in zeta."""
    coeffs = np.asarray(coeffs, dtype=complex)
    centers = np.atleast_2d(np.asarray(centers, dtype=complex))

    def fn(z):
        out = np.zeros(len(z), dtype=complex)
        for c, b in zip(coeffs, centers):
            out += c * reproducing_kernel(lam, np.broadcast_to(b, z.shape), z)
        return out

    return EntireFunction(fn, centers.shape[1], 0.0, None, "twisted kernel span")


def twisted_inner(lam, F, G, order=16):
    """``int F(zeta) conj(G(zeta)) w_lam(zeta) dzeta`` over C^{2n}."""
    d = F.dim
    W = w_lambda_form(lam, d // 2)

    def logmod(X):
        z = X[:, :d] + 1j * X[:, d:]
        return np.log(np.abs(F(z) * G(z)) + 1e-300) - np.einsum("ki,ij,kj->k", X, W, X)

    g = gaussian_grid(order, W, _peak(logmod, 2 * d, W))
    z = g.nodes[:, :d] + 1j * g.nodes[:, d:]
    return tree_sum(g.plain_weights * F(z) * np.conj(G(z)) * w_lambda(lam, z))


# --------------------------------------------------------------------------
# convolution operators

def apply_convolution_operator(phi, F, lam, points, order=None):
    """``S_phi F`` at points.

    ``lam = 0``: ``int F(w) phi(z - conj w) e^{z.conj(w)/2} e^{-|w|^2/2} dw`` over C^n.
    ``lam != 0``: ``int F(z') phi(z - conj z') conj(K(z, z')) w_lam(z') dz'`` over C^{2n}.
    The rule is centred at the estimated peak of the integrand for each point.
    """
    d = F.dim
    pts = as_points(points, d)
    if lam == 0:
        P = 0.5 * np.eye(2 * d)
        order = order or 40
    else:
        P = w_lambda_form(lam, d // 2)
        order = order or 18
    out = np.empty(len(pts), dtype=complex)
    for k, z in enumerate(pts):
        integrand = _convolution_integrand(phi, F, lam, z, d)

        def logmod(X, f=integrand):
            return np.log(np.abs(f(X)) + 1e-300)

        g = gaussian_grid(order, P, _peak(logmod, 2 * d, P))
        out[k] = tree_sum(g.plain_weights * integrand(g.nodes))
    return out


def _convolution_integrand(phi, F, lam, z, d):
    def fn(X):
        zp = X[:, :d] + 1j * X[:, d:]
        zpb = np.conj(zp)
        arg = z[None, :] - zpb
        if lam == 0:
            k = np.exp(0.5 * zpb @ z) * np.exp(-0.5 * np.sum(X * X, axis=1))
        else:
            c = lam / np.tanh(lam)
            zz = np.broadcast_to(z, zp.shape)
            k = (np.exp(0.5 * c * np.sum(zz * zpb, axis=1))
                 * np.exp(-0.5j * lam * symplectic_form(zz, zpb))
                 * w_lambda(lam, zp))
        return F(zp) * phi(arg) * k

    return fn


def constant_function(c, dim):
    return EntireFunction(lambda p: np.full(len(p), c, dtype=complex), dim, 0.0,
                          [(np.zeros((dim, dim)), np.zeros(dim))], f"{c}")


def twisted_identity_symbol(basis):
    """``G_lam(I)`` is the constant ``(2 pi/|lam|)^n``."""
    return constant_function(hs_constant(basis.n, basis.lam), 2 * basis.n)


def identity_operator(basis):
    return OperatorMatrix.identity(basis)
