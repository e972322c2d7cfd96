"""Schroedinger representation, Weyl transform and twisted convolution.

Points of R^{2n} are stored as ``(x, u)`` with ``x, u`` in R^n. Operators are
matrices ``entries[beta, alpha] = (T Phi_alpha, Phi_beta)`` over the truncated
basis; functions on R^{2n} are coefficient arrays ``C[alpha, beta]`` of
``sum C[alpha, beta] Phi_{alpha beta}``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from math import pi, sqrt

import numpy as np

from .quad import Sampler, gauss_hermite, gaussian_grid, tensor_grid, tree_sum
from .specfun import (
    BasisSpec,
    DimensionError,
    _check_lambda,
    as_points,
    hermite_basis_values,
    hermite_functions,
    matrix_elements,
    special_hermite_prefactor,
)

RESIDUAL_TOL = 1e-6


class AccuracyWarning(RuntimeWarning):
    pass


def weyl_constant(n, lam):
    """``c_lam = (2 pi)^{n/2} |lam|^{-n/2}``.

    ``(pi_lam(g) Phi_alpha, Phi_beta) = c_lam (g, conj Phi_{alpha beta})`` and
    ``Phi_{ab} *_lam Phi_{mu nu} = c_lam delta_{b mu} Phi_{a nu}``.
    """
    return 1.0 / special_hermite_prefactor(n, lam)


def symplectic_form(p, q):
    """``[(x, u), (y, v)] = u.y - v.x``; bilinear, so complex entries are fine."""
    p = np.asarray(p)
    q = np.asarray(q)
    if p.shape[-1] != q.shape[-1]:
        raise DimensionError("arguments must have the same length")
    if p.shape[-1] % 2:
        raise DimensionError("symplectic form needs even-length vectors")
    n = p.shape[-1] // 2
    x, u = p[..., :n], p[..., n:]
    y, v = q[..., :n], q[..., n:]
    return np.sum(u * y, axis=-1) - np.sum(v * x, axis=-1)


# --------------------------------------------------------------------------
# coefficient containers

@dataclass
class OperatorMatrix:
    basis: BasisSpec
    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)
        s = self.basis.size
        if self.entries.shape != (s, s):
            raise DimensionError(f"expected a {s}x{s} matrix, got {self.entries.shape}")

    @classmethod
    def identity(cls, basis):
        return cls(basis, np.eye(basis.size))

    @classmethod
    def zeros(cls, basis):
        return cls(basis, np.zeros((basis.size, basis.size)))

    @classmethod
    def rank_one(cls, basis, alpha=None, beta=None, c=1.0):
        """``c * Phi_beta (x) Phi_alpha``: sends Phi_alpha to c Phi_beta."""
        n = basis.n
        a = basis.position(alpha if alpha is not None else (0,) * n)
        b = basis.position(beta if beta is not None else (0,) * n)
        m = np.zeros((basis.size, basis.size), dtype=complex)
        m[b, a] = c
        return cls(basis, m)

    def hs_norm(self):
        return float(np.linalg.norm(self.entries))

    def __matmul__(self, other):
        return OperatorMatrix(self.basis, self.entries @ other.entries)

    def __add__(self, other):
        return OperatorMatrix(self.basis, self.entries + other.entries)

    def __mul__(self, c):
        return OperatorMatrix(self.basis, c * self.entries)

    __rmul__ = __mul__


@dataclass
class CoeffVector:
    """Coefficients in the Hermite basis (``kind='hermite'``, shape (S,)) or the
    special Hermite basis (``kind='special'``, shape (S, S)).

    ``exact`` marks expansions known to be finite (not truncations of
    something infinite); the classifier uses it.
    """

    basis: BasisSpec
    coeffs: np.ndarray
    kind: str = "hermite"
    exact: bool = True
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        s = self.basis.size
        want = (s,) if self.kind == "hermite" else (s, s)
        if self.kind not in ("hermite", "special"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.coeffs.shape != want:
            raise DimensionError(f"expected coefficient shape {want}, got {self.coeffs.shape}")

    @classmethod
    def basis_element(cls, basis, alpha, beta=None):
        if beta is None:
            c = np.zeros(basis.size, dtype=complex)
            c[basis.position(alpha)] = 1.0
            return cls(basis, c, "hermite")
        c = np.zeros((basis.size, basis.size), dtype=complex)
        c[basis.position(alpha), basis.position(beta)] = 1.0
        return cls(basis, c, "special")

    @classmethod
    def random(cls, basis, rng, kind="special", terms=6, max_degree=None):
        """Random finite expansion with ``terms`` non-zero coefficients."""
        top = basis.max_degree if max_degree is None else max_degree
        allowed = [i for i, a in enumerate(basis.indices) if sum(a) <= top]
        if kind == "hermite":
            c = np.zeros(basis.size, dtype=complex)
            pick = rng.choice(allowed, size=min(terms, len(allowed)), replace=False)
            c[pick] = rng.normal(size=len(pick)) + 1j * rng.normal(size=len(pick))
            return cls(basis, c, kind)
        pairs = [(i, j) for i in allowed for j in allowed]
        c = np.zeros((basis.size, basis.size), dtype=complex)
        pick = rng.choice(len(pairs), size=min(terms, len(pairs)), replace=False)
        for p in pick:
            c[pairs[p]] = rng.normal() + 1j * rng.normal()
        return cls(basis, c, kind)

    def norm(self):
        return float(np.linalg.norm(self.coeffs))

    def scaled(self, c):
        return CoeffVector(self.basis, c * self.coeffs, self.kind, self.exact, dict(self.meta))

    def __add__(self, other):
        return CoeffVector(self.basis, self.coeffs + other.coeffs, self.kind, self.exact and other.exact)

    @property
    def dim(self):
        return self.basis.n if self.kind == "hermite" else 2 * self.basis.n

    def evaluate(self, points):
        """Value of the expansion at real or complex points (entire extension)."""
        pts = as_points(points, self.dim)
        if self.kind == "hermite":
            return self.coeffs @ hermite_basis_values(self.basis, pts)
        n = self.basis.n
        idx = self.basis.indices
        E = matrix_elements(idx, idx, self.basis.lam, pts[:, :n], pts[:, n:])
        return special_hermite_prefactor(n, self.basis.lam) * np.einsum("ab,abk->k", self.coeffs, E)

    def sampler(self):
        lam = abs(self.basis.lam)
        return Sampler(self.evaluate, self.dim, lam / 2 if self.kind == "hermite" else lam / 4)


# --------------------------------------------------------------------------
# Schroedinger representation

def schrodinger_matrix(lam, x, y, basis):
    """Closed-form ``entries[beta, alpha] = (pi_lam(x, y) Phi_alpha, Phi_beta)``.

    Valid for complex ``(x, y)`` by holomorphic continuation.
    """
    _check_lambda(lam)
    x = np.atleast_1d(np.asarray(x, dtype=complex))[None, :]
    y = np.atleast_1d(np.asarray(y, dtype=complex))[None, :]
    if x.shape[1] != basis.n or y.shape[1] != basis.n:
        raise DimensionError("x and y must have length n")
    E = matrix_elements(basis.indices, basis.indices, lam, x, y)[:, :, 0]
    return OperatorMatrix(basis, E.T)


@dataclass
class ActionResult:
    value: CoeffVector
    residual: float


def _xi_grid(basis, shift):
    g1 = gauss_hermite(basis.quad_order, abs(basis.lam))
    grid = tensor_grid(*[g1] * basis.n)
    return grid.nodes + shift[None, :], grid.plain_weights


def schrodinger_act(lam, x, y, f, warn_tol=RESIDUAL_TOL):
    """Coefficients of ``xi -> exp(i lam (x.xi + x.y/2)) f(xi + y)``.

    The image is sampled on a Gauss-Hermite grid centred at ``-Re(y)/2`` and
    projected back onto the truncated basis. ``residual`` is the L^2 mass the
    truncation loses, ``sqrt(|g|^2 - |Pg|^2)``.
    """
    _check_lambda(lam)
    if f.kind != "hermite":
        raise ValueError("schrodinger_act needs a Hermite-basis CoeffVector")
    basis = f.basis
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    y = np.atleast_1d(np.asarray(y, dtype=complex))
    if len(x) != basis.n or len(y) != basis.n:
        raise DimensionError("x and y must have length n")
    xi, w = _xi_grid(basis, -0.5 * y.real)
    phase = np.exp(1j * lam * (xi @ x + 0.5 * np.dot(x, y)))
    g = phase * f.evaluate(xi + y[None, :])
    vals = hermite_basis_values(basis, xi)
    # Phi_beta is real on the real axis
    c = vals.real @ (w * g)
    mass = tree_sum(w * np.abs(g) ** 2).real
    resid = sqrt(max(mass - float(np.sum(np.abs(c) ** 2)), 0.0))
    if resid > warn_tol * max(1.0, sqrt(mass)):
        warnings.warn(f"truncation residual {resid:.3g}", AccuracyWarning, stacklevel=2)
    return ActionResult(CoeffVector(basis, c, "hermite", f.exact), resid)


# --------------------------------------------------------------------------
# Weyl transform

def weyl_from_coeffs(g):
    """Exact Weyl transform of a finite special Hermite expansion.

    ``M[d, c] = c_lam (-1)^{|c|+|d|} C[d, c]``.
    """
    if g.kind != "special":
        raise ValueError("need a special Hermite expansion")
    b = g.basis
    sign = (-1.0) ** (b.degrees[:, None] + b.degrees[None, :])
    return OperatorMatrix(b, weyl_constant(b.n, b.lam) * sign * g.coeffs)


def coeffs_from_weyl(M, exact=True):
    """Inverse of :func:`weyl_from_coeffs` on the truncated basis."""
    b = M.basis
    sign = (-1.0) ** (b.degrees[:, None] + b.degrees[None, :])
    return CoeffVector(b, sign * M.entries / weyl_constant(b.n, b.lam), "special", exact)


def _inner_matrix_elements(basis, X, order):
    """``E[a, b, k] = (pi_lam(x_k, u_k) Phi_a, Phi_b)`` by quadrature in xi."""
    lam = basis.lam
    n = basis.n
    r = sqrt(abs(lam))
    g1 = gauss_hermite(order, abs(lam))
    t = g1.nodes[:, 0]
    w = g1.plain_weights
    kmax = basis.max_degree
    idx = np.array(basis.indices)
    out = np.ones((basis.size, basis.size, X.shape[0]), dtype=complex)
    for j in range(n):
        x = X[:, j][:, None]
        u = X[:, n + j][:, None]
        xi = t[None, :] - 0.5 * u
        ha = hermite_functions(kmax, r * (xi + u)).real
        hb = hermite_functions(kmax, r * xi).real
        ph = w[None, :] * np.exp(1j * lam * (x * xi + 0.5 * x * u)) * r
        tab = np.einsum("akq,bkq,kq->abk", ha, hb, ph)
        out *= tab[idx[:, j][:, None], idx[:, j][None, :]]
    return out


def weyl_transform(lam, g, basis=None, route="operator", order=None, inner_order=None):
    """Weyl transform ``pi_lam(g) = int g(x, u) pi_lam(x, u) dx du`` as a matrix.

    ``g`` is either a special Hermite :class:`CoeffVector` (exact map) or a
    :class:`Sampler` on R^{2n}. For samplers two routes are available:

    ``"operator"``
        outer Gauss-Hermite quadrature over (x, u) of ``g`` times the matrix
        elements, themselves computed by an inner quadrature in xi.
    ``"special"``
        ``c_lam (g, conj Phi_{alpha beta})`` with closed-form Phi.
    """
    _check_lambda(lam)
    if isinstance(g, CoeffVector):
        return weyl_from_coeffs(g)
    if basis is None:
        raise ValueError("sampler input needs a basis")
    n = basis.n
    if g.dim != 2 * n:
        raise DimensionError("sampler must live on R^{2n}")
    # Phi_ab decays like exp(-|lam| |X|^2 / 4)
    prec = g.decay + abs(lam) / 4
    grid = gaussian_grid(order or basis.quad_order, prec * np.eye(2 * n), g.center)
    X = grid.nodes
    vals = grid.plain_weights * g(X)
    if route == "operator":
        # the phase e^{i lam x xi} oscillates fast at outer nodes far out
        E = _inner_matrix_elements(basis, X, inner_order or min(2 * basis.quad_order, 256))
        M = np.einsum("k,abk->ba", vals, E)
    elif route == "special":
        idx = basis.indices
        E = matrix_elements(idx, idx, lam, X[:, :n], X[:, n:])
        M = np.einsum("k,abk->ba", vals, E)
    else:
        raise ValueError(f"unknown route {route!r}")
    return OperatorMatrix(basis, M)


def weyl_norm_ratio(lam, g):
    """``|pi_lam(g)|_HS / |g|_2`` for a finite special Hermite expansion."""
    return weyl_from_coeffs(g).hs_norm() / g.norm()


# --------------------------------------------------------------------------
# twisted convolution

def twisted_phase(lam, X, A):
    """``exp(-i lam/2 (u.a - x.b))`` for X = (x, u), A = (a, b)."""
    return np.exp(-0.5j * lam * symplectic_form(X, A))


def twisted_convolve_coeffs(f, g):
    """Coefficient engine: ``(F *_lam G) = c_lam F @ G``."""
    if f.kind != "special" or g.kind != "special":
        raise ValueError("coefficient engine needs special Hermite expansions")
    b = f.basis
    return CoeffVector(b, weyl_constant(b.n, b.lam) * f.coeffs @ g.coeffs, "special", f.exact and g.exact)


@dataclass
class ConvolutionResult:
    values: np.ndarray
    residual: float


def twisted_convolve_at(lam, f, g, points, order=40, check_order=None, check=True):
    """``(f *_lam g)(X) = int f(A) g(X - A) exp(-i lam/2 [X, A]) dA`` at points.

    For each X the rule is centred where the Gaussian envelopes of f(A) and
    g(X - A) peak jointly. ``residual`` is the largest difference against a
    rule of order ``check_order`` (default ``order + 8``).
    """
    _check_lambda(lam)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    d = f.dim
    if g.dim != d or pts.shape[1] != d:
        raise DimensionError("dimension mismatch in twisted convolution")
    a, b = f.decay, g.decay

    def run(q):
        base = gaussian_grid(q, (a + b) * np.eye(d))
        out = np.empty(len(pts), dtype=complex)
        for i, X in enumerate(pts):
            A = base.nodes + (b / (a + b)) * X
            vals = f(A) * g(X[None, :] - A) * twisted_phase(lam, X[None, :], A)
            out[i] = tree_sum(base.plain_weights * vals)
        return out

    vals = run(order)
    if not check:
        return ConvolutionResult(vals, float("nan"))
    resid = float(np.max(np.abs(vals - run(check_order or order + 8)), initial=0.0))
    return ConvolutionResult(vals, resid)


def twisted_convolve(lam, f, g, order=40):
    """Grid engine: a Sampler evaluating ``f *_lam g`` pointwise by quadrature."""
    if isinstance(f, CoeffVector) and isinstance(g, CoeffVector):
        return twisted_convolve_coeffs(f, g)
    f = f.sampler() if isinstance(f, CoeffVector) else f
    g = g.sampler() if isinstance(g, CoeffVector) else g

    def fn(pts):
        return twisted_convolve_at(lam, f, g, pts, order, check=False).values

    return Sampler(fn, f.dim, min(f.decay, g.decay))


def hs_constant(n, lam):
    """``|pi_lam(g)|_HS^2 / |g|^2 = (2 pi / |lam|)^n``."""
    return (2 * pi / abs(lam)) ** n
