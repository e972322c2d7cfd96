"""Bergman-type weights, weighted norms, spectral sums and the boundedness classifier.

Points of C^d are written ``xi + i eta`` and integrals run over
``X = (xi, eta)`` in R^{2d}. For the twisted families d = 2n and
``xi = (x, u)``, ``eta = (y, v)`` with ``z = x + iy``, ``w = u + iv``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, pi

import numpy as np

from .bargmann import EntireFunction, SymbolSpec
from .heisen import CoeffVector, OperatorMatrix, weyl_from_coeffs
from .quad import gauss_hermite, gaussian_grid, tree_sum
from .semigrp import hermite_semigroup, kappa, special_hermite_semigroup
from .specfun import laguerre

FAMILIES = ("classical_wt", "twisted_wt_lambda", "hermite_Ut_lambda", "splHermite_Wt_lambda")
DEFAULT_T_GRID = (0.1, 0.2, 0.3, 0.4, 0.45, 0.49, 0.5)
CHUNK = 16384


class WeightParameterError(ValueError):
    pass


class DegenerateWeightError(ArithmeticError):
    """The integrand has no net Gaussian decay; quadrature would be meaningless."""


@dataclass(frozen=True)
class WeightSpec:
    """One of the four weight families.

    ``classical_wt``
        ``w_t(x, y) = exp(-(|x|^2+|y|^2)/2 + 2t/(1+2t) |y|^2)`` on C^n.
    ``twisted_wt_lambda``
        ``exp((a/2)(tanh 2ta - coth a)|xi|^2 + (a/2)(coth a - coth 2ta)|eta|^2)`` on C^{2n}.
    ``hermite_Ut_lambda``
        ``(a/pi)^n sinh(4ta)^{-n} exp((a/2) tanh(2ta)|xi|^2 - (a/2) coth(2ta)|eta|^2)``.
    ``splHermite_Wt_lambda``
        ``exp(lam Im(z.conj w)) p_{2t}(2y, 2v)``.

    Here ``a = |lam|``.
    """

    family: str
    t: float
    lam: float = 0.0
    n: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise WeightParameterError(f"unknown weight family {self.family!r}")
        if self.family == "classical_wt":
            if self.t < 0:
                raise WeightParameterError("classical weight needs t >= 0")
            return
        if self.lam == 0:
            raise WeightParameterError("twisted weights need lambda != 0")
        if self.family == "twisted_wt_lambda" and not (0 < self.t <= 0.5):
            raise WeightParameterError("twisted weight needs 0 < t <= 1/2")
        if self.t <= 0:
            raise WeightParameterError("t must be positive")

    @property
    def dim(self):
        """Real dimension of the integration domain."""
        return 2 * self.n if self.family == "classical_wt" else 4 * self.n

    def form(self):
        """``(P, c)`` with weight ``= c exp(-X^T P X)``."""
        n, t = self.n, self.t
        if self.family == "classical_wt":
            d = np.concatenate([np.full(n, 0.5), np.full(n, 0.5 - 2 * t / (1 + 2 * t))])
            return np.diag(d), 1.0
        a = abs(self.lam)
        m = 2 * n
        coth = lambda s: 1.0 / np.tanh(s)
        if self.family == "twisted_wt_lambda":
            d = np.concatenate([np.full(m, 0.5 * a * (coth(a) - np.tanh(2 * t * a))),
                                np.full(m, 0.5 * a * (coth(2 * t * a) - coth(a)))])
            return np.diag(d), 1.0
        if self.family == "hermite_Ut_lambda":
            d = np.concatenate([np.full(m, -0.5 * a * np.tanh(2 * t * a)),
                                np.full(m, 0.5 * a * coth(2 * t * a))])
            return np.diag(d), (a / pi) ** n * np.sinh(4 * t * a) ** (-n)
        # splHermite_Wt_lambda
        P = np.zeros((4 * n, 4 * n))
        for i in range(n):
            x, u, y, v = i, n + i, 2 * n + i, 3 * n + i
            P[y, y] = P[v, v] = a * coth(2 * t * a)
            # exponent lam (y.u - x.v)
            P[u, y] = P[y, u] = -0.5 * self.lam
            P[x, v] = P[v, x] = 0.5 * self.lam
        return P, kappa(n) * a ** n * np.sinh(2 * t * a) ** (-n)

    def __call__(self, xi, eta):
        X = np.concatenate([np.atleast_2d(xi), np.atleast_2d(eta)], axis=1)
        P, c = self.form()
        out = c * np.exp(-np.einsum("ki,ij,kj->k", X, P, X))
        return out[0] if out.shape == (1,) else out


def eval_weight(spec, xi, eta):
    return spec(xi, eta)


# --------------------------------------------------------------------------
# weighted norms

@dataclass
class NormValue:
    value: float
    tail_bound: float


def _net_precision(phi, P_w):
    """Net Gaussian precision and centre of ``|phi|^2 * weight``."""
    forms = phi.log_form()
    if forms is None:
        return P_w, None
    best = None
    for K, k in forms:
        P = P_w - 2 * K
        ev = np.linalg.eigvalsh(P)
        if ev[0] <= 1e-12:
            raise DegenerateWeightError(f"net decay {ev[0]:.3g} is not positive")
        if best is None or ev[0] < best[0]:
            best = (ev[0], P, np.linalg.solve(P, k))
    return best[1], best[2]


def gaussian_weighted_integral(fn, P, center=None, order=24, chunk=CHUNK):
    """``int fn(X) dX`` with nodes adapted to ``exp(-X^T P X)`` (plain weights)."""
    g = gaussian_grid(order, P, center)
    parts = []
    for s in range(0, len(g), chunk):
        parts.append(g.plain_weights[s:s + chunk] * fn(g.nodes[s:s + chunk]))
    return tree_sum(np.concatenate(parts)) if parts else 0.0


def weighted_norm(phi, spec, order=None, check_order=None):
    """``int |phi(xi + i eta)|^2 weight(xi, eta) dxi deta`` and a tail estimate.

    The rule is adapted to the net Gaussian of ``|phi|^2 * weight`` using the
    growth data carried by ``phi``; without growth data the weight alone must
    decay. The tail estimate is the change against a coarser rule.
    """
    if phi.dim * 2 != spec.dim:
        raise ValueError("weight and function live on different spaces")
    P_w, c = spec.form()
    P, center = _net_precision(phi, P_w)
    if phi.growth is None and np.linalg.eigvalsh(P)[0] <= 1e-12:
        raise DegenerateWeightError("weight does not decay and phi carries no growth data")
    d = phi.dim
    order = order or (24 if spec.dim <= 2 else 16)

    def integrand(X):
        z = X[:, :d] + 1j * X[:, d:]
        return np.abs(phi(z)) ** 2 * c * np.exp(-np.einsum("ki,ij,kj->k", X, P_w, X))

    v = gaussian_weighted_integral(integrand, P, center, order).real
    v2 = gaussian_weighted_integral(integrand, P, center, check_order or order - 4).real
    return NormValue(float(v), float(abs(v - v2)))


def holomorphic(f):
    """EntireFunction view of a special Hermite expansion (its entire extension)."""
    return EntireFunction(f.evaluate, f.dim, 0.0, [(-0.25 * abs(f.basis.lam) * np.eye(f.dim), np.zeros(f.dim))])


# --------------------------------------------------------------------------
# spectral sums

def _matrix(obj):
    if isinstance(obj, OperatorMatrix):
        return obj
    if isinstance(obj, CoeffVector):
        return weyl_from_coeffs(obj)
    raise TypeError("need an OperatorMatrix or a special Hermite CoeffVector")


def shell_sums(M):
    """``s_k = sum_{|alpha|+|beta|=k} |M[beta, alpha]|^2`` for k = 0..2N."""
    M = _matrix(M)
    b = M.basis
    deg = b.degrees[:, None] + b.degrees[None, :]
    return np.bincount(deg.ravel(), weights=np.abs(M.entries.ravel()) ** 2, minlength=2 * b.max_degree + 1)


def spectral_sum(M, t, lam=None):
    """``sum_k s_k exp(-(1-2t)(2k+2n)|lam|)`` over the truncated matrix."""
    M = _matrix(M)
    b = M.basis
    a = abs(b.lam if lam is None else lam)
    s = shell_sums(M)
    k = np.arange(len(s))
    return float(np.sum(s * np.exp(-(1 - 2 * t) * (2 * k + 2 * b.n) * a)))


def operator_norm_estimate(M):
    """Largest singular value of the truncated matrix (a lower bound for the norm)."""
    M = _matrix(M)
    if not M.entries.size:
        return 0.0
    return float(np.linalg.norm(M.entries, 2))


@dataclass
class RatioReport:
    lhs: float
    rhs: float
    tail_bound: float = 0.0

    @property
    def ratio(self):
        return self.lhs / self.rhs


def verify_weighted_spectral_identity(f, t, order=None):
    """Weighted integral of ``F = e^{-H/2} f`` against U_t versus the spectral sum.

    The ratio is a constant depending on (t, lam, n) only.
    """
    if not 0 < t < 0.5:
        raise WeightParameterError("identity is stated for 0 < t < 1/2")
    b = f.basis
    F = holomorphic(hermite_semigroup(0.5, f))
    spec = WeightSpec("hermite_Ut_lambda", t, b.lam, b.n)
    nv = weighted_norm(F, spec, order)
    return RatioReport(nv.value, spectral_sum(f, t), nv.tail_bound)


# --------------------------------------------------------------------------
# Bergman-type identities

def hermite_bergman(f, t, order=None):
    """``int |e^{-tH} f|^2 U_t`` against ``|f|_2^2``."""
    F = holomorphic(hermite_semigroup(t, f))
    nv = weighted_norm(F, WeightSpec("hermite_Ut_lambda", t, f.basis.lam, f.basis.n), order)
    return RatioReport(nv.value, f.norm() ** 2, nv.tail_bound)


def special_hermite_bergman(f, t, order=None):
    """``int |e^{-tL} f|^2 W_t`` against ``|f|_2^2``."""
    F = holomorphic(special_hermite_semigroup(t, f.basis.lam, f))
    nv = weighted_norm(F, WeightSpec("splHermite_Wt_lambda", t, f.basis.lam, f.basis.n), order)
    return RatioReport(nv.value, f.norm() ** 2, nv.tail_bound)


def mixed_semigroup_relation(f, t, right_time=None, order=None):
    """``int |e^{-tH} f|^2 W_t^{-lam}`` against ``int |e^{-2tL} f|^2 W_s^{lam}``.

    ``right_time`` is ``s``; the relation holds with ``s = t``.
    """
    b = f.basis
    s = t if right_time is None else right_time
    lhs = weighted_norm(holomorphic(hermite_semigroup(t, f)), WeightSpec("splHermite_Wt_lambda", t, -b.lam, b.n), order)
    rhs = weighted_norm(holomorphic(special_hermite_semigroup(2 * t, b.lam, f)),
                        WeightSpec("splHermite_Wt_lambda", s, b.lam, b.n), order)
    return RatioReport(lhs.value, rhs.value, lhs.tail_bound + rhs.tail_bound)


def half_time_bound(f, order=None):
    """``int |e^{-H/2} f|^2 W_{1/2}``, ``|e^{-H/2} T|_HS^2`` and ``|T|_op`` for T = pi(f)."""
    b = f.basis
    lhs = weighted_norm(holomorphic(hermite_semigroup(0.5, f)), WeightSpec("splHermite_Wt_lambda", 0.5, b.lam, b.n), order)
    T = weyl_from_coeffs(f)
    d = np.exp(-0.5 * (2 * b.degrees + b.n) * abs(b.lam))
    hs = float(np.linalg.norm(d[:, None] * T.entries) ** 2)
    return lhs.value, hs, operator_norm_estimate(T)


def gutzmer_sides(f, y, v, n_theta=64, order=64):
    """Circle-averaged left side and Laguerre-series right side (n = 1).

    ``lhs = (1/2pi) int dtheta int e^{-2 lam y_th xi} |F(xi + i v_th)|^2 dxi``
    with ``(y_th, v_th)`` the rotation of ``(y, v)`` by theta, and
    ``rhs = sum_k L_k(-2|lam| r^2) e^{|lam| r^2} |P_k f|^2``.
    """
    b = f.basis
    if b.n != 1 or f.kind != "hermite":
        raise ValueError("circle average is implemented for Hermite expansions on R")
    lam = b.lam
    a = abs(lam)
    r2 = y * y + v * v
    th = 2 * pi * np.arange(n_theta) / n_theta
    yt = y * np.cos(th) - v * np.sin(th)
    vt = y * np.sin(th) + v * np.cos(th)
    g = gauss_hermite(order, a)
    vals = []
    for yy, vv in zip(yt, vt):
        # |F(xi + i v)|^2 e^{-2 lam y xi} peaks near xi = -lam y / a
        xi = g.nodes[:, 0] - lam * yy / a
        F = f.evaluate((xi + 1j * vv)[:, None])
        vals.append(tree_sum(g.plain_weights * np.exp(-2 * lam * yy * xi) * np.abs(F) ** 2).real)
    lhs = float(np.mean(vals))
    shells = np.bincount(b.degrees, weights=np.abs(f.coeffs) ** 2)
    rhs = float(sum(laguerre(k, 0, -2 * a * r2).real * np.exp(a * r2) * s for k, s in enumerate(shells)))
    return lhs, rhs


# --------------------------------------------------------------------------
# classifier

STATUSES = ("sufficient-certified", "necessary-passed", "necessary-failed", "inconclusive")


@dataclass
class Verdict:
    status: str
    t_sweep: list = field(default_factory=list)
    a_sweep: list = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")


@dataclass
class ShellFit:
    rate: float
    power: float
    const: float
    support: int  # last non-zero shell
    residual: float


def fit_shells(s, kmax, rel_floor=1e-28):
    """Fit ``log s_k = r k + p log(k+1) + c`` over the non-zero shells k <= kmax."""
    s = np.asarray(s[: kmax + 1], dtype=float)
    top = float(np.max(s, initial=0.0))
    nz = np.nonzero(s > rel_floor * max(top, 1e-300))[0]
    if top == 0 or len(nz) == 0:
        return ShellFit(-np.inf, 0.0, -np.inf, -1, 0.0)
    support = int(nz[-1])
    use = nz[nz >= 1] if len(nz[nz >= 1]) >= 3 else nz
    if len(use) < 3:
        return ShellFit(-np.inf, 0.0, float(np.log(s[support])), support, 0.0)
    k = use.astype(float)
    A = np.stack([k, np.log(k + 1), np.ones_like(k)], axis=1)
    coef, *_ = np.linalg.lstsq(A, np.log(s[use]), rcond=None)
    resid = float(np.max(np.abs(A @ coef - np.log(s[use]))))
    return ShellFit(float(coef[0]), float(coef[1]), float(coef[2]), support, resid)


def _model_tail(fit, t, a, n, kmin, kcap=100000):
    """Extrapolated ``sum_{k > kmin} s_k e^{-(1-2t)(2k+2n)a}`` from the fit."""
    if not np.isfinite(fit.rate):
        return 0.0
    rate = fit.rate - 2 * (1 - 2 * t) * a
    if rate > 0 or (abs(rate) < 1e-12 and fit.power >= -1):
        return float("inf")
    k = np.arange(kmin + 1, kmin + kcap + 1, dtype=float)
    terms = np.exp(rate * k + fit.power * np.log(k + 1) + fit.const - (1 - 2 * t) * 2 * n * a)
    return float(terms.sum())


def classify(symbol, t_grid=DEFAULT_T_GRID, a_grid=None, margin=0.05, order=None):
    """Decide what the weighted-norm criteria say about the operator with symbol ``symbol``.

    Returns a :class:`Verdict`; see the module README for the decision table.
    """
    if symbol.lam == 0:
        return _classify_classical(symbol, t_grid, a_grid, order)
    M = symbol.operator()
    if M is None:
        return _classify_sampler(symbol, t_grid, order)
    return _classify_matrix(symbol, M, t_grid, margin)


def _classify_matrix(symbol, M, t_grid, margin):
    b = M.basis
    a = abs(b.lam)
    N = b.max_degree
    exact = bool(symbol.meta.get("exact", getattr(symbol.payload, "exact", False)))
    s = shell_sums(M)
    fit = fit_shells(s, N)
    # divergence of the extrapolated series sets in at t0
    t0 = 0.5 - fit.rate / (4 * a) if np.isfinite(fit.rate) else np.inf
    finite_support = fit.support < N or exact
    sweep, failed = [], []
    for t in t_grid:
        val = spectral_sum(M, t)
        tail = 0.0 if finite_support else _model_tail(fit, t, a, b.n, N)
        sweep.append((float(t), val, tail))
        if t < 0.5 and not finite_support and t >= t0 and fit.rate > margin:
            failed.append(float(t))
    diag = {"fit_rate": fit.rate, "fit_power": fit.power, "fit_residual": fit.residual,
            "support": fit.support, "truncation": N, "divergence_onset": t0,
            "hs_norm_sq": spectral_sum(M, 0.5), "operator_norm": operator_norm_estimate(M)}
    if failed:
        return Verdict("necessary-failed", sweep, [], {"diverging_t": failed, "onset": t0}, diag)
    hs_finite = finite_support or fit.rate < -margin or (abs(fit.rate) <= margin and fit.power < -1 - margin)
    if hs_finite:
        return Verdict("sufficient-certified", sweep, [], {}, diag)
    return Verdict("necessary-passed", sweep, [], {}, diag)


def _classify_sampler(symbol, t_grid, order):
    phi = symbol.entire()
    sweep, failed = [], []
    for t in t_grid:
        if t >= 0.5:
            sweep.append((float(t), float("nan"), float("nan")))
            continue
        try:
            nv = weighted_norm(phi, WeightSpec("twisted_wt_lambda", t, symbol.lam, symbol.n), order)
            sweep.append((float(t), nv.value, nv.tail_bound))
        except DegenerateWeightError:
            sweep.append((float(t), float("inf"), float("nan")))
            failed.append(float(t))
    diag = {"reason": "no matrix form; t = 1/2 not evaluated by quadrature"}
    if failed:
        return Verdict("necessary-failed", sweep, [], {"diverging_t": failed}, diag)
    return Verdict("inconclusive", sweep, [], {}, diag)


def default_a_grid(n=1, radius=8.0, points=17):
    """Axis-aligned shifts with ``|a| <= radius``, ``points`` per axis."""
    ax = np.linspace(-radius, radius, points)
    out = {tuple(np.zeros(n))}
    for j in range(n):
        for v in ax:
            a = np.zeros(n)
            a[j] = v
            out.add(tuple(a))
    return sorted(out, key=lambda a: (float(np.linalg.norm(a)), a))


def _classical_conditions(phi, a, order):
    n = phi.dim
    a = np.asarray(a, dtype=float)
    shifted = EntireFunction(lambda z: phi(z + 1j * a[None, :]), n, 0.0,
                             _shift_growth(phi.growth, a), "shifted")
    # (i) int |phi(z + ia)|^2 e^{-|z|^2/2} dz
    try:
        c1 = weighted_norm(shifted, WeightSpec("classical_wt", 0.0, 0.0, n), order).value
    except DegenerateWeightError:
        c1 = float("inf")
    # (ii) sup_x |phi(x + ia)| e^{-|x|^2/4}, and the L^1 version
    g = gauss_hermite(order or 48, 0.25)
    x1 = g.nodes[:, 0]
    xs = np.stack(np.meshgrid(*[x1] * n, indexing="ij"), axis=-1).reshape(-1, n)
    w = np.prod(np.stack(np.meshgrid(*[g.plain_weights] * n, indexing="ij"), axis=-1).reshape(-1, n), axis=1)
    with np.errstate(over="ignore", invalid="ignore"):
        vals = np.abs(phi(xs + 1j * a[None, :])) * np.exp(-0.25 * np.sum(xs * xs, axis=1))
    vals = np.where(np.isfinite(vals), vals, np.inf)
    c2 = float(np.max(vals))
    strong = float(tree_sum(w * vals))
    edge = np.max(np.abs(xs), axis=1) >= np.max(np.abs(x1)) - 1e-12
    if np.max(vals[edge]) > 1e-6 * max(c2, 1e-300):
        c2 = strong = float("inf")
    return c1, c2, strong


def _shift_growth(growth, a):
    if growth is None:
        return None
    out = []
    for A, beta in growth:
        A = np.asarray(A, dtype=complex)
        # (z + ia)^T A (z + ia) = z^T A z + 2i a^T A z + const
        out.append((A, np.asarray(beta, dtype=complex) + 2j * A @ a))
    return out


def _grows(values, radii, factor=10.0):
    """Outer values exceed inner ones by ``factor`` and increase monotonically."""
    v = np.asarray(values, dtype=float)
    r = np.asarray(radii, dtype=float)
    if np.any(~np.isfinite(v)):
        return True
    inner = v[r <= r.max() / 4].max()
    order = np.argsort(r)
    outer = v[r >= 0.75 * r.max()].max()
    rv = [v[r == rr].max() for rr in np.unique(r[order])]
    monotone = all(y >= x * (1 - 1e-9) for x, y in zip(rv, rv[1:]))
    return outer > factor * max(inner, 1e-300) and monotone


def _classify_classical(symbol, t_grid, a_grid, order):
    phi = symbol.entire()
    n = phi.dim
    grid = a_grid if a_grid is not None else default_a_grid(n)
    a_sweep = []
    for a in grid:
        c1, c2, strong = _classical_conditions(phi, a, order)
        a_sweep.append((tuple(float(x) for x in a), c1, c2, strong))
    radii = [float(np.linalg.norm(a)) for a, *_ in a_sweep]
    grows = {name: _grows([row[i] for row in a_sweep], radii) for i, name in
             ((1, "condition_i"), (2, "condition_ii"), (3, "strong_l1"))}
    sweep, failed = [], []
    for t in t_grid:
        if t >= 0.5:
            sweep.append((float(t), float("nan"), float("nan")))
            continue
        try:
            nv = weighted_norm(phi, WeightSpec("classical_wt", t, 0.0, n), order)
            sweep.append((float(t), nv.value, nv.tail_bound))
        except DegenerateWeightError:
            sweep.append((float(t), float("inf"), float("nan")))
            failed.append(float(t))
    witnesses = {k: True for k, v in grows.items() if v}
    diag = {"a_grid_radius": max(radii), "a_grid_points": len(grid)}
    if failed:
        witnesses["diverging_t"] = failed
    if grows["condition_i"] or grows["condition_ii"] or failed:
        return Verdict("necessary-failed", sweep, a_sweep, witnesses, diag)
    if grows["strong_l1"]:
        return Verdict("inconclusive", sweep, a_sweep, witnesses, diag)
    return Verdict("sufficient-certified", sweep, a_sweep, witnesses, diag)


def identity_sweep_prediction(t, lam, n=1, kmax=2000):
    """The majorant ``sum_k C(k+2n-1, k) e^{-(1-2t)(2k+2n)|lam|}`` for bounded symbols."""
    a = abs(lam)
    return float(sum(comb(k + 2 * n - 1, k) * np.exp(-(1 - 2 * t) * (2 * k + 2 * n) * a) for k in range(kmax + 1)))


def identity_sweep_exact(t, lam, n=1, max_degree=16):
    """Spectral sum of the truncated identity: only diagonal entries contribute."""
    from .specfun import multi_indices

    a = abs(lam)
    return float(sum(np.exp(-(1 - 2 * t) * (4 * sum(al) + 2 * n) * a) for al in multi_indices(n, max_degree)))
