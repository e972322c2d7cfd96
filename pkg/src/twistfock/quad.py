"""Gauss-Hermite rules, tensor and general-Gaussian grids, deterministic summation."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import pi, sqrt

import numpy as np
from scipy.special import roots_hermite

ORDER_CAP = 256


class QuadratureParameterError(ValueError):
    pass


@dataclass(frozen=True)
class QuadratureGrid:
    """Nodes and weights for integrals of the form ``int f(x) e^{-(x-c)^T P (x-c)} dx``.

    ``weights`` integrate against the Gaussian; ``plain_weights`` integrate
    plain Lebesgue measure (``weights * exp(+quadratic form)``), which is what
    you want when the integrand already carries its own decay.
    """

    nodes: np.ndarray
    weights: np.ndarray
    plain_weights: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        if self.nodes.ndim != 2:
            raise ValueError("nodes must be (K, dim)")
        if not (len(self.nodes) == len(self.weights) == len(self.plain_weights)):
            raise ValueError("nodes and weights must have the same length")

    @property
    def dimension(self):
        return self.nodes.shape[1]

    def __len__(self):
        return len(self.weights)


def _plain_weights_1d(order):
    # w_i e^{t_i^2} = 1 / (Q h_{Q-1}(t_i)^2), overflow free
    from .specfun import hermite_functions

    t, _ = roots_hermite(order)
    h = hermite_functions(order - 1, t)[order - 1].real
    return t, 1.0 / (order * h * h)


def gauss_hermite(order, scale=1.0):
    """1-D rule exact for ``p(x) e^{-scale x^2}`` with ``deg p <= 2*order - 1``."""
    if order < 1 or order > ORDER_CAP:
        raise QuadratureParameterError(f"order must be in [1, {ORDER_CAP}]")
    if not scale > 0:
        raise QuadratureParameterError("scale must be positive")
    t, w = roots_hermite(order)
    _, pw = _plain_weights_1d(order)
    s = sqrt(scale)
    return QuadratureGrid(
        nodes=(t / s)[:, None],
        weights=w / s,
        plain_weights=pw / s,
        scale=float(scale),
    )


def tensor_grid(*grids):
    """Product rule of 1-D (or lower dimensional) grids; weights multiply."""
    nodes = grids[0].nodes
    w = grids[0].weights
    pw = grids[0].plain_weights
    for g in grids[1:]:
        k1, k2 = len(nodes), len(g)
        nodes = np.hstack([np.repeat(nodes, k2, axis=0), np.tile(g.nodes, (k1, 1))])
        w = np.outer(w, g.weights).ravel()
        pw = np.outer(pw, g.plain_weights).ravel()
    return QuadratureGrid(nodes=nodes, weights=w, plain_weights=pw, scale=grids[0].scale)


def gaussian_grid(order, precision, center=None):
    """Tensor rule adapted to ``exp(-(x-c)^T P (x-c))`` for a positive definite P.

    With ``P = L L^T`` the substitution ``x = c + L^{-T} s`` maps the weight to
    ``e^{-|s|^2}``. The returned ``plain_weights`` integrate Lebesgue measure,
    so callers can pass integrands carrying the full Gaussian themselves.
    """
    P = np.atleast_2d(np.asarray(precision, dtype=float))
    d = P.shape[0]
    try:
        L = np.linalg.cholesky(P)
    except np.linalg.LinAlgError as exc:
        raise QuadratureParameterError("precision matrix is not positive definite") from exc
    base = tensor_grid(*[gauss_hermite(order) for _ in range(d)])
    A = np.linalg.inv(L).T
    c = np.zeros(d) if center is None else np.asarray(center, dtype=float)
    nodes = base.nodes @ A.T + c
    det = np.prod(np.diag(L))
    return QuadratureGrid(
        nodes=nodes,
        weights=base.weights / det,
        plain_weights=base.plain_weights / det,
        scale=float(np.min(np.linalg.eigvalsh(P))),
    )


def tree_sum(values, leaf=64):
    """Pairwise summation over fixed-size leaves.

    The grouping depends only on ``len(values)``, so the result is identical
    however the leaves were produced.
    """
    v = np.asarray(values)
    if v.size == 0:
        return v.dtype.type(0)
    k = -(-len(v) // leaf)
    pad = k * leaf - len(v)
    if pad:
        v = np.concatenate([v, np.zeros((pad,) + v.shape[1:], dtype=v.dtype)])
    parts = v.reshape((k, leaf) + v.shape[1:]).sum(axis=1)
    return _pairwise(parts)


def _pairwise(parts):
    while len(parts) > 1:
        if len(parts) % 2:
            parts = np.concatenate([parts, np.zeros((1,) + parts.shape[1:], dtype=parts.dtype)])
        parts = parts[0::2] + parts[1::2]
    return parts[0]


def integrate(sampler, grid, plain=False, workers=1, leaf=64):
    """Weighted sum of ``sampler(nodes)`` over the grid.

    ``sampler`` takes an array (K, dim) and returns K values. With
    ``workers > 1`` the leaves are evaluated concurrently and combined in the
    same fixed tree order, so the result is bit-identical to ``workers=1``.
    """
    w = grid.plain_weights if plain else grid.weights
    if workers <= 1:
        vals = np.asarray(sampler(grid.nodes))
        return tree_sum(w * vals, leaf)
    k = -(-len(grid) // leaf)
    chunks = [slice(i * leaf, min((i + 1) * leaf, len(grid))) for i in range(k)]

    def leaf_sum(sl):
        prod = w[sl] * np.asarray(sampler(grid.nodes[sl]))
        pad = leaf - len(prod)
        if pad:
            prod = np.concatenate([prod, np.zeros(pad, dtype=prod.dtype)])
        return prod.reshape(1, leaf).sum(axis=1)[0]

    with ThreadPoolExecutor(max_workers=workers) as ex:
        parts = np.array(list(ex.map(leaf_sum, chunks)))
    return _pairwise(parts)


def gaussian_mass(n):
    """``int e^{-|x|^2} dx`` over R^n."""
    return pi ** (n / 2.0)


@dataclass(frozen=True)
class Sampler:
    """A vectorised function on R^dim with a declared Gaussian decay rate.

    ``decay`` is a precision ``d`` with ``|fn(x)| <~ exp(-d |x - center|^2)``;
    grid engines use it to place their nodes.
    """

    fn: object
    dim: int
    decay: float
    center: tuple | None = None

    def __call__(self, points):
        pts = np.asarray(points)
        if pts.ndim == 1:
            pts = pts[None, :]
        return np.asarray(self.fn(pts))

    def grid(self, order):
        c = None if self.center is None else np.asarray(self.center, dtype=float)
        return gaussian_grid(order, self.decay * np.eye(self.dim), c)
