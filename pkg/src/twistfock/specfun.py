"""Scaled Hermite, Laguerre and special Hermite functions.

Conventions used throughout the package:

* ``Phi_alpha^lam(x) = |lam|^{n/4} prod_j h_{alpha_j}(|lam|^{1/2} x_j)`` where
  ``h_k`` are the L^2-normalised Hermite functions.
* ``pi_lam(x, u) f(xi) = exp(i lam (x.xi + x.u/2)) f(xi + u)``.
* ``E_{alpha beta}(x, u) = (pi_lam(x, u) Phi_alpha, Phi_beta)`` are the matrix
  elements; ``Phi_{alpha beta} = (2 pi)^{-n/2} |lam|^{n/2} E_{alpha beta}``.

All evaluators accept complex arguments; the three-term recurrences are entire
in the argument so evaluating them at complex points *is* the holomorphic
extension.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from functools import lru_cache
from math import lgamma, pi, sqrt

import numpy as np

RECURSION_CAP = 256
DEFAULT_MAX_DEGREE = 16


class InvalidScaleError(ValueError):
    """Raised when lambda = 0 is passed where a twisted object is needed."""


class CapacityError(ValueError):
    """Raised when a degree exceeds the configured recursion cap."""


class DimensionError(ValueError):
    """Raised on inconsistent index or point lengths."""


class CancellationWarning(RuntimeWarning):
    """Complex argument far enough off the real axis that recurrences lose digits."""


def _check_lambda(lam):
    if lam == 0:
        raise InvalidScaleError("lambda must be non-zero")


def _check_cap(k, cap=RECURSION_CAP):
    if k > cap:
        raise CapacityError(f"degree {k} exceeds recursion cap {cap}")


# --------------------------------------------------------------------------
# multi-indices

@dataclass(frozen=True)
class MultiIndex:
    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))
        if any(e < 0 for e in self.entries):
            raise ValueError("multi-index entries must be non-negative")

    @property
    def n(self):
        return len(self.entries)

    @property
    def degree(self):
        return sum(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


def as_index(alpha):
    if isinstance(alpha, MultiIndex):
        return alpha.entries
    if np.isscalar(alpha):
        return (int(alpha),)
    return tuple(int(a) for a in alpha)


@lru_cache(maxsize=None)
def multi_indices(n, max_degree):
    """All multi-indices of length ``n`` with ``|alpha| <= max_degree``.

    Ordering is graded lexicographic: by total degree, then lexicographically
    descending in the first coordinate. This ordering is used for every matrix
    and coefficient array in the package.
    """
    out = []
    for k in range(max_degree + 1):
        shell = [a for a in itertools.product(range(k + 1), repeat=n) if sum(a) == k]
        shell.sort(reverse=True)
        out.extend(shell)
    return tuple(out)


@dataclass(frozen=True)
class BasisSpec:
    """Truncated scaled-Hermite eigenbasis of L^2(R^n)."""

    n: int = 1
    lam: float = 1.0
    max_degree: int = DEFAULT_MAX_DEGREE
    quad_order: int = 64

    def __post_init__(self):
        if self.n < 1:
            raise DimensionError("n must be a positive integer")
        _check_lambda(self.lam)
        if self.max_degree < 0:
            raise ValueError("max_degree must be non-negative")
        if self.quad_order < 2 * self.max_degree + 2:
            raise ValueError("quad_order must be >= 2*max_degree + 2")
        _check_cap(self.max_degree)

    @property
    def indices(self):
        return multi_indices(self.n, self.max_degree)

    @property
    def size(self):
        return len(self.indices)

    @property
    def degrees(self):
        return np.array([sum(a) for a in self.indices])

    def eigenvalues(self):
        """Eigenvalues ``(2|alpha| + n)|lam|`` of H(lam) on the truncated basis."""
        return (2 * self.degrees + self.n) * abs(self.lam)

    def position(self, alpha):
        return self.indices.index(as_index(alpha))


@dataclass(frozen=True)
class ComplexPoint:
    re: tuple
    im: tuple

    def __post_init__(self):
        re = tuple(float(v) for v in np.atleast_1d(self.re))
        im = tuple(float(v) for v in np.atleast_1d(self.im))
        if len(re) != len(im):
            raise DimensionError("real and imaginary parts have different lengths")
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    @classmethod
    def from_complex(cls, z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return cls(tuple(z.real), tuple(z.imag))

    def __array__(self, dtype=None, copy=None):
        z = np.array(self.re) + 1j * np.array(self.im)
        return z if dtype is None else z.astype(dtype)

    def __len__(self):
        return len(self.re)

    def split(self):
        """Split a C^{2n} point into its (z, w) halves."""
        if len(self) % 2:
            raise DimensionError("point does not have even length")
        z = np.asarray(self)
        h = len(self) // 2
        return z[:h], z[h:]


def as_points(points, dim=None):
    """Coerce a point or array of points to a complex array of shape (K, dim)."""
    if isinstance(points, ComplexPoint):
        arr = np.asarray(points)[None, :]
    else:
        arr = np.asarray(points, dtype=complex)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        elif arr.ndim == 1:
            arr = arr[None, :] if dim is None or arr.shape[0] == dim else arr[:, None]
    if dim is not None and arr.shape[-1] != dim:
        raise DimensionError(f"expected points of length {dim}, got {arr.shape[-1]}")
    return arr


# --------------------------------------------------------------------------
# one-dimensional building blocks

def hermite_functions(kmax, x):
    """Normalised Hermite functions ``h_0..h_kmax`` at (complex) ``x``.

    Returns an array of shape ``(kmax + 1,) + x.shape``.
    """
    _check_cap(kmax)
    x = np.asarray(x, dtype=complex)
    out = np.empty((kmax + 1,) + x.shape, dtype=complex)
    out[0] = pi ** -0.25 * np.exp(-0.5 * x * x)
    if kmax >= 1:
        out[1] = sqrt(2.0) * x * out[0]
    for k in range(1, kmax):
        out[k + 1] = sqrt(2.0 / (k + 1)) * x * out[k] - sqrt(k / (k + 1)) * out[k - 1]
    return out


def hermite_derivatives(h):
    """Derivatives of the Hermite functions from the ladder rule.

    ``h_k' = sqrt(k/2) h_{k-1} - sqrt((k+1)/2) h_{k+1}``; needs ``h`` up to one
    degree beyond the last derivative returned.
    """
    kmax = h.shape[0] - 2
    d = np.empty((kmax + 1,) + h.shape[1:], dtype=h.dtype)
    for k in range(kmax + 1):
        d[k] = -sqrt((k + 1) / 2.0) * h[k + 1]
        if k:
            d[k] += sqrt(k / 2.0) * h[k - 1]
    return d


def laguerre(k, alpha, x):
    """Generalised Laguerre polynomial ``L_k^alpha(x)`` by forward recurrence."""
    _check_cap(k)
    x = np.asarray(x, dtype=complex)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    for j in range(k):
        prev, cur = cur, ((2 * j + 1 + alpha - x) * cur - (j + alpha) * prev) / (j + 1)
    return cur


def laguerre_table(kmax, alpha, x):
    """``L_0^alpha .. L_kmax^alpha`` at ``x`` stacked along axis 0."""
    _check_cap(kmax)
    x = np.asarray(x, dtype=complex)
    out = np.empty((kmax + 1,) + x.shape, dtype=complex)
    out[0] = 1.0
    if kmax >= 1:
        out[1] = 1.0 + alpha - x
    for j in range(1, kmax):
        out[j + 1] = ((2 * j + 1 + alpha - x) * out[j] - (j + alpha) * out[j - 1]) / (j + 1)
    return out


def _warn_if_far(im_max, lam):
    limit = 6.0 / sqrt(abs(lam))
    if im_max > limit:
        warnings.warn(
            f"|Im z| = {im_max:.3g} exceeds {limit:.3g}; recurrence may lose digits",
            CancellationWarning,
            stacklevel=3,
        )


def matrix_element_table(kmax, lam, x, u):
    """Table ``T[a, b] = (pi_lam(x, u) Phi_a, Phi_b)`` in one dimension.

    Closed form via displacement-operator matrix elements: with
    ``g = (-U + iX)/sqrt(2)``, ``g~ = (-U - iX)/sqrt(2)``, ``X = sgn(lam)|lam|^{1/2} x``,
    ``U = |lam|^{1/2} u``,

        T[a, b] = sqrt(a!/b!) g^{b-a} e^{-g g~/2} L_a^{(b-a)}(g g~)        (b >= a)
        T[a, b] = sqrt(b!/a!) (-g~)^{a-b} e^{-g g~/2} L_b^{(a-b)}(g g~)    (b <  a)

    ``g~`` is the holomorphic stand-in for the conjugate of ``g``, so the same
    expression is valid for complex ``(x, u)``.
    """
    _check_lambda(lam)
    _check_cap(kmax)
    x = np.asarray(x, dtype=complex)
    u = np.asarray(u, dtype=complex)
    r = sqrt(abs(lam))
    X = np.sign(lam) * r * x
    U = r * u
    g = (-U + 1j * X) / sqrt(2.0)
    gt = (-U - 1j * X) / sqrt(2.0)
    q = g * gt
    gauss = np.exp(-0.5 * q)
    shape = np.broadcast(x, u).shape
    out = np.empty((kmax + 1, kmax + 1) + shape, dtype=complex)
    lgam = [lgamma(k + 1) for k in range(kmax + 1)]
    for m in range(kmax + 1):
        lt = laguerre_table(kmax - m, m, q)
        gp = g ** m
        gtp = (-gt) ** m
        for j in range(kmax + 1 - m):
            c = np.exp(0.5 * (lgam[j] - lgam[j + m]))
            val = c * lt[j] * gauss
            out[j, j + m] = val * gp
            if m:
                out[j + m, j] = val * gtp
    return out


def matrix_elements(alphas, betas, lam, x, u):
    """``E_{alpha beta}(x, u)`` for lists of multi-indices, any dimension.

    ``x`` and ``u`` have shape ``(K, n)``; returns ``(len(alphas), len(betas), K)``.
    """
    x = np.atleast_2d(np.asarray(x, dtype=complex))
    u = np.atleast_2d(np.asarray(u, dtype=complex))
    n = x.shape[1]
    kmax = max(max(max(a) for a in alphas), max(max(b) for b in betas))
    tables = [matrix_element_table(kmax, lam, x[:, j], u[:, j]) for j in range(n)]
    A = np.array(alphas)
    B = np.array(betas)
    out = np.ones((len(alphas), len(betas), x.shape[0]), dtype=complex)
    for j in range(n):
        out *= tables[j][A[:, j][:, None], B[:, j][None, :]]
    return out


# --------------------------------------------------------------------------
# public evaluators

def eval_hermite(alpha, lam, point):
    """Scaled Hermite function ``Phi_alpha^lam`` at a (complex) point.

    ``point`` may be a ComplexPoint, a length-n vector or an array of shape
    (K, n); returns a scalar for a single point.
    """
    _check_lambda(lam)
    alpha = as_index(alpha)
    n = len(alpha)
    pts = as_points(point, n)
    _warn_if_far(np.max(np.abs(pts.imag), initial=0.0), lam)
    r = sqrt(abs(lam))
    val = np.full(pts.shape[0], abs(lam) ** (n / 4.0), dtype=complex)
    for j, a in enumerate(alpha):
        val *= hermite_functions(a, r * pts[:, j])[a]
    return val[0] if _single(point, n) else val


def hermite_basis_values(basis, points):
    """All basis functions of ``basis`` at ``points`` -> array (size, K)."""
    pts = as_points(points, basis.n)
    r = sqrt(abs(basis.lam))
    kmax = basis.max_degree
    tabs = [hermite_functions(kmax, r * pts[:, j]) for j in range(basis.n)]
    out = np.full((basis.size, pts.shape[0]), abs(basis.lam) ** (basis.n / 4.0), dtype=complex)
    for i, a in enumerate(basis.indices):
        for j, aj in enumerate(a):
            out[i] *= tabs[j][aj]
    return out


def laguerre_function(k, n, lam, point):
    """``phi_{k,lam}^{n-1}(x, u) = L_k^{n-1}(|lam| Q/2) exp(-|lam| Q/4)``.

    ``Q = sum z_j^2 + sum w_j^2`` is the holomorphic quadratic form, so at
    purely imaginary points the exponential grows.
    """
    _check_lambda(lam)
    _check_cap(k)
    pts = as_points(point, 2 * n)
    Q = np.sum(pts * pts, axis=1)
    val = laguerre(k, n - 1, 0.5 * abs(lam) * Q) * np.exp(-0.25 * abs(lam) * Q)
    return val[0] if _single(point, 2 * n) else val


def special_hermite_prefactor(n, lam):
    """``(2 pi)^{-n/2} |lam|^{n/2}``, the normalisation of Phi_{alpha beta}."""
    return (2 * pi) ** (-n / 2.0) * abs(lam) ** (n / 2.0)


def eval_special_hermite(alpha, beta, lam, point, method="closed", quad_order=96):
    """Special Hermite function ``Phi_{alpha beta}^lam`` on (C^n x C^n).

    ``method="closed"`` uses the closed-form matrix elements (valid at complex
    points). ``method="quadrature"`` expands ``(pi_lam(x,u) Phi_alpha, Phi_beta)``
    by Gauss-Hermite quadrature in xi; real points only.
    """
    _check_lambda(lam)
    alpha = as_index(alpha)
    beta = as_index(beta)
    if len(alpha) != len(beta):
        raise DimensionError("alpha and beta must have the same length")
    n = len(alpha)
    pts = as_points(point, 2 * n)
    if method == "closed":
        _warn_if_far(np.max(np.abs(pts.imag), initial=0.0), lam)
        e = matrix_elements([alpha], [beta], lam, pts[:, :n], pts[:, n:])[0, 0]
    elif method == "quadrature":
        if np.any(pts.imag != 0):
            raise ValueError("quadrature route is only defined at real points")
        e = _matrix_element_quadrature(alpha, beta, lam, pts.real[:, :n], pts.real[:, n:], quad_order)
    else:
        raise ValueError(f"unknown method {method!r}")
    val = special_hermite_prefactor(n, lam) * e
    return val[0] if _single(point, 2 * n) else val


def _matrix_element_quadrature(alpha, beta, lam, x, u, order):
    from .quad import gauss_hermite

    # integrand e^{i lam (x xi + x u / 2)} Phi_a(xi + u) Phi_b(xi), centred at -u/2
    grid = gauss_hermite(order, abs(lam))
    t = grid.nodes[:, 0]
    w = grid.plain_weights
    r = sqrt(abs(lam))
    n = len(alpha)
    out = np.ones(x.shape[0], dtype=complex)
    for j in range(n):
        xi = t[None, :] - 0.5 * u[:, j][:, None]
        fa = hermite_functions(alpha[j], r * (xi + u[:, j][:, None]))[alpha[j]]
        fb = hermite_functions(beta[j], r * xi)[beta[j]]
        phase = np.exp(1j * lam * (x[:, j][:, None] * xi + 0.5 * x[:, j][:, None] * u[:, j][:, None]))
        out *= np.sqrt(abs(lam)) * np.sum(w[None, :] * phase * fa * np.conj(fb), axis=1)
    return out


def special_hermite_values(lam, n, pairs, points):
    """Values of ``Phi_{alpha beta}`` for a list of ``(alpha, beta)`` pairs.

    Returns (len(pairs), K). Uses one matrix-element table for all pairs.
    """
    pts = as_points(points, 2 * n)
    alphas = sorted({as_index(a) for a, _ in pairs})
    betas = sorted({as_index(b) for _, b in pairs})
    E = matrix_elements(alphas, betas, lam, pts[:, :n], pts[:, n:])
    ia = {a: i for i, a in enumerate(alphas)}
    ib = {b: i for i, b in enumerate(betas)}
    pre = special_hermite_prefactor(n, lam)
    return np.array([pre * E[ia[as_index(a)], ib[as_index(b)]] for a, b in pairs])


def _single(point, dim):
    if isinstance(point, ComplexPoint):
        return True
    arr = np.asarray(point)
    return arr.ndim == 0 or (arr.ndim == 1 and arr.shape[0] == dim)
