"""Heat, Hermite and special Hermite semigroups."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial, pi

import numpy as np

from .heisen import CoeffVector, Sampler, twisted_convolve_at, twisted_convolve_coeffs, weyl_constant
from .quad import gaussian_grid, tree_sum
from .specfun import (
    BasisSpec,
    _check_lambda,
    as_points,
    hermite_basis_values,
    laguerre,
    matrix_elements,
    special_hermite_prefactor,
)


class KernelParameterError(ValueError):
    pass


class DivergenceError(ArithmeticError):
    """Input grows too fast for the requested operation."""


@dataclass(frozen=True)
class KernelSpec:
    family: str  # "heat" or "twisted"
    t: float
    lam: float = 0.0
    n: int = 1

    def __post_init__(self):
        if self.family not in ("heat", "twisted"):
            raise KernelParameterError(f"unknown family {self.family!r}")
        if not self.t > 0:
            raise KernelParameterError("t must be positive")
        if self.family == "twisted" and self.lam == 0:
            raise KernelParameterError("twisted kernel needs lambda != 0")

    @property
    def dim(self):
        return self.n if self.family == "heat" else 2 * self.n

    def __call__(self, point):
        return eval_kernel(self, point)


def eval_kernel(spec, point):
    if spec.family == "heat":
        return heat_kernel(spec.t, point, spec.n)
    return twisted_heat_kernel(spec.t, spec.lam, point, spec.n)


def heat_kernel(t, point, n=None):
    """``q_t(x) = (4 pi t)^{-n/2} exp(-x^2 / 4t)`` with the holomorphic square."""
    if not t > 0:
        raise KernelParameterError("t must be positive")
    single = np.ndim(point) == 0 or (np.ndim(point) == 1 and (n is None or len(point) == n))
    pts = as_points(point, n)
    n = pts.shape[1]
    val = (4 * pi * t) ** (-n / 2.0) * np.exp(-np.sum(pts * pts, axis=1) / (4 * t))
    return val[0] if single else val


# --------------------------------------------------------------------------
# twisted heat kernel

def _twisted_shape(t, lam, Q, n):
    a = abs(lam)
    return a ** n * np.sinh(t * a) ** (-n) * np.exp(-0.25 * a / np.tanh(t * a) * Q)


@lru_cache(maxsize=None)
def kappa(n):
    """Prefactor of the twisted heat kernel, fixed by calibration.

    Requires the (0, 0) entry of ``pi_lam(p_t)`` to equal ``e^{-t n |lam|}``
    at ``t = lam = 1``; computed once by quadrature against the closed-form
    special Hermite function. Analytically this is ``(4 pi)^{-n}``.
    """
    t = lam = 1.0
    d = 2 * n
    prec = 0.25 / np.tanh(t) + 0.25
    grid = gaussian_grid(48, prec * np.eye(d))
    X = grid.nodes
    Q = np.sum(X * X, axis=1)
    zero = [(0,) * n]
    e00 = matrix_elements(zero, zero, lam, X[:, :n], X[:, n:])[0, 0]
    entry = tree_sum(grid.plain_weights * _twisted_shape(t, lam, Q, n) * e00).real
    return float(np.exp(-t * n * lam) / entry)


def twisted_heat_kernel(t, lam, point, n=None):
    """``p_t^lam(x, u) = kappa_n |lam|^n sinh(t|lam|)^{-n} e^{-|lam| coth(t|lam|) Q / 4}``.

    ``Q`` is the holomorphic square of the point, so complex points give the
    entire extension.
    """
    if not t > 0:
        raise KernelParameterError("t must be positive")
    if lam == 0:
        raise KernelParameterError("lambda must be non-zero")
    pts = as_points(point, None if n is None else 2 * n)
    n = pts.shape[1] // 2
    Q = np.sum(pts * pts, axis=1)
    val = kappa(n) * _twisted_shape(t, lam, Q, n)
    return val[0] if np.ndim(point) == 1 and len(point) == 2 * n else val


def twisted_heat_decay(t, lam):
    return 0.25 * abs(lam) / np.tanh(t * abs(lam))


def twisted_heat_sampler(t, lam, n, prefactor=1.0):
    """``p_t^lam`` as a grid sampler; ``prefactor`` is only for fault injection."""
    return Sampler(lambda X: prefactor * twisted_heat_kernel(t, lam, X, n), 2 * n, twisted_heat_decay(t, lam))


def twisted_heat_series(t, lam, point, n, kmax=40):
    """Truncated Laguerre expansion ``sum_k e^{-t(2k+n)|lam|} phi_k``, no prefactor."""
    pts = as_points(point, 2 * n)
    a = abs(lam)
    Q = np.sum(pts * pts, axis=1)
    s = sum(np.exp(-t * (2 * k + n) * a) * laguerre(k, n - 1, 0.5 * a * Q) for k in range(kmax + 1))
    return s * np.exp(-0.25 * a * Q)


def twisted_heat_coeffs(t, basis):
    """Special Hermite coefficients of ``p_t^lam`` on the truncated basis.

    Diagonal, ``e^{-t(2|mu|+n)|lam|} / c_lam``; a truncation, so ``exact=False``.
    """
    b = basis
    d = np.exp(-t * (2 * b.degrees + b.n) * abs(b.lam)) / weyl_constant(b.n, b.lam)
    return CoeffVector(b, np.diag(d), "special", exact=False)


# --------------------------------------------------------------------------
# semigroups

def hermite_semigroup(t, f):
    """``e^{-tH}`` in coefficients.

    On L^2(R^n) the eigenvalue of Phi_alpha is ``(2|alpha|+n)|lam|``; on
    L^2(R^{2n}) the eigenvalue of Phi_{alpha beta} is
    ``(2|alpha|+2|beta|+2n)|lam|``.
    """
    if t < 0:
        raise KernelParameterError("t must be non-negative")
    b = f.basis
    a = abs(b.lam)
    if f.kind == "hermite":
        damp = np.exp(-t * (2 * b.degrees + b.n) * a)
    else:
        deg = b.degrees[:, None] + b.degrees[None, :]
        damp = np.exp(-t * (2 * deg + 2 * b.n) * a)
    out = CoeffVector(b, damp * f.coeffs, f.kind, f.exact, dict(f.meta))
    out.meta["smoothing"] = f.meta.get("smoothing", 0.0) + t
    return out


def special_hermite_semigroup(t, lam, f, engine="coeff", order=40):
    """``e^{-tL_lam} f = f *_lam p_t^lam``.

    ``engine="coeff"`` multiplies ``C[a, b]`` by ``e^{-t(2|b|+n)|lam|}``;
    ``engine="grid"`` returns a Sampler doing the twisted convolution with
    the closed-form kernel on the right.
    """
    _check_lambda(lam)
    if engine == "coeff":
        if not isinstance(f, CoeffVector) or f.kind != "special":
            raise ValueError("coefficient engine needs a special Hermite expansion")
        b = f.basis
        damp = np.exp(-t * (2 * b.degrees + b.n) * abs(lam))
        return CoeffVector(b, f.coeffs * damp[None, :], "special", f.exact, dict(f.meta))
    if engine != "grid":
        raise ValueError(f"unknown engine {engine!r}")
    g = f.sampler() if isinstance(f, CoeffVector) else f
    n = g.dim // 2
    p = twisted_heat_sampler(t, lam, n)
    _check_window(g, p)
    return Sampler(lambda X: twisted_convolve_at(lam, g, p, X, order, check=False).values, g.dim, g.decay)


def left_heat_convolution(t, lam, f):
    """``p_t *_lam f`` in coefficients: rows damped by ``e^{-t(2|a|+n)|lam|}``."""
    b = f.basis
    damp = np.exp(-t * (2 * b.degrees + b.n) * abs(lam))
    return CoeffVector(b, damp[:, None] * f.coeffs, "special", f.exact, dict(f.meta))


def _check_window(f, p):
    if f.decay + p.decay <= 0:
        raise DivergenceError("input grows faster than the kernel window")


def sandwich(t, lam, f, engine="coeff", order=32, kernel_prefactor=1.0):
    """``p_t *_lam f *_lam p_t``.

    The coefficient engine uses the truncated kernel expansion and the
    coefficient algebra; the grid engine nests two twisted-convolution
    quadratures with the closed-form kernel.
    """
    _check_lambda(lam)
    if engine == "coeff":
        p = twisted_heat_coeffs(t, f.basis)
        out = twisted_convolve_coeffs(twisted_convolve_coeffs(p, f), p)
        out.exact = f.exact
        out.meta = dict(f.meta, smoothing=f.meta.get("smoothing", 0.0) + t)
        return out
    if engine != "grid":
        raise ValueError(f"unknown engine {engine!r}")
    g = f.sampler() if isinstance(f, CoeffVector) else f
    n = g.dim // 2
    p = twisted_heat_sampler(t, lam, n, kernel_prefactor)
    _check_window(g, p)
    inner = Sampler(lambda X: twisted_convolve_at(lam, g, p, X, order, check=False).values, g.dim, g.decay)
    return Sampler(lambda X: twisted_convolve_at(lam, p, inner, X, order, check=False).values, g.dim, g.decay)


# --------------------------------------------------------------------------
# holomorphic extension

@dataclass
class ExtensionValue:
    value: complex
    tail_bound: float


def holomorphic_extend(f, point):
    """Evaluate the entire extension of a (smoothed) expansion at a complex point.

    Refuses truncations that were never smoothed, since their coefficients
    carry no decay guarantee. The tail bound is the modulus of the top
    degree shell, zero for finite expansions.
    """
    smoothing = f.meta.get("smoothing", 0.0)
    if not f.exact and smoothing <= 0:
        raise DivergenceError("coefficients have no decay; apply a semigroup first")
    pts = as_points(point, f.dim)
    b = f.basis
    if f.kind == "hermite":
        vals = hermite_basis_values(b, pts)
        terms = f.coeffs[:, None] * vals
        top = b.degrees == b.max_degree
        tail = np.abs(terms[top]).sum(axis=0)
    else:
        n = b.n
        E = matrix_elements(b.indices, b.indices, b.lam, pts[:, :n], pts[:, n:])
        terms = special_hermite_prefactor(n, b.lam) * f.coeffs[:, :, None] * E
        top = (b.degrees[:, None] == b.max_degree) | (b.degrees[None, :] == b.max_degree)
        tail = np.abs(terms[top]).sum(axis=0)
        terms = terms.reshape(-1, terms.shape[-1])
    value = terms.sum(axis=0)
    tail = np.zeros_like(tail) if f.exact else tail
    if np.ndim(point) == 1 and len(point) == f.dim:
        return ExtensionValue(complex(value[0]), float(tail[0]))
    return ExtensionValue(value, tail)


# --------------------------------------------------------------------------
# integrals against Laguerre functions

def laguerre_pairing(k, t, lam, n=1, imaginary=True, order=48):
    """Normalised ``int p_{2t}(2y, 2v) phi_k(2iy, 2iv) dy dv`` over R^{2n}.

    With ``imaginary=False`` the Laguerre function is evaluated at the real
    point ``(2y, 2v)`` instead. The factor ``k!(n-1)!/(k+n-1)!`` is applied.
    """
    a = abs(lam)
    c = a / np.tanh(2 * t * a)
    # p_{2t}(2Y) ~ exp(-c|Y|^2); phi_k(2iY) ~ exp(+a|Y|^2), phi_k(2Y) ~ exp(-a|Y|^2)
    net = c - a if imaginary else c + a
    if net <= 0:
        raise DivergenceError("pairing integral diverges")
    grid = gaussian_grid(order, net * np.eye(2 * n))
    Y = grid.nodes
    Q = np.sum(Y * Y, axis=1)
    s = -1.0 if imaginary else 1.0
    # combine the two Gaussians before exponentiating; each alone can overflow
    pre = kappa(n) * a ** n * np.sinh(2 * t * a) ** (-n)
    vals = pre * laguerre(k, n - 1, s * 2 * a * Q) * np.exp(-net * Q)
    norm = factorial(k) * factorial(n - 1) / factorial(k + n - 1)
    return float(norm * tree_sum(grid.plain_weights * vals).real)


def default_basis(n=1, lam=1.0, max_degree=12, quad_order=64):
    return BasisSpec(n, lam, max_degree, quad_order)
