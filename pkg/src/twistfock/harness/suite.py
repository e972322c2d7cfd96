"""The identity regression suite behind ``twistfock verify``.

Each check returns measured values, calibration constants, a deviation and
a tail bound; the record passes when ``deviation + tail_bound <= tolerance``.
Constants the theory leaves unspecified are measured, so most checks test
that a ratio is the same across inputs rather than its value.
"""
from __future__ import annotations

import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import gamma, pi

import numpy as np

from .. import bergman as bg
from ..bargmann import (
    SymbolSpec,
    fock_action,
    fock_norm,
    gauss_bargmann,
    gauss_bargmann_function,
    multiplier_action,
    plancherel_sides,
    recover_multiplier,
    twisted_gauss_bargmann,
)
from ..expr import parse
from ..heisen import (
    CoeffVector,
    OperatorMatrix,
    schrodinger_act,
    schrodinger_matrix,
    twisted_convolve_at,
    twisted_convolve_coeffs,
    weyl_constant,
    weyl_from_coeffs,
    weyl_transform,
)
from ..quad import gauss_hermite, tensor_grid, tree_sum
from ..semigrp import hermite_semigroup, laguerre_pairing, sandwich, twisted_heat_kernel
from ..specfun import BasisSpec, hermite_basis_values, hermite_derivatives, hermite_functions, matrix_elements
from .report import ReportRecord

FAULTS = ("kernel-prefactor",)
FAULT_PREFACTOR = 1.01


@dataclass
class Context:
    n: int = 1
    lam: float = 1.0
    seed: int = 0
    fault: str | None = None

    def rng(self, name):
        # independent, name-keyed streams keep checks order- and thread-independent
        return np.random.default_rng([self.seed, zlib.crc32(name.encode())])


@dataclass
class Outcome:
    measured: dict
    deviation: float
    constants: dict = None
    tail_bound: float = 0.0


def spread(values):
    """Largest relative deviation of ``values`` from their mean."""
    v = np.asarray(values)
    m = np.mean(v)
    return float(np.max(np.abs(v - m)) / abs(m))


def _rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


# --------------------------------------------------------------------------
# special functions and quadrature

def check_hermite_orthonormality(ctx):
    errs = {}
    for lam in (0.5, 1.0, 2.0):
        b = BasisSpec(1, lam, 12, 64)
        g = gauss_hermite(64, lam)
        V = hermite_basis_values(b, g.nodes).real
        G = (V * g.plain_weights) @ V.T
        errs[lam] = float(np.max(np.abs(G - np.eye(b.size))))
    return Outcome({"gram_error": errs}, max(errs.values()))


def check_hermite_eigenrelation(ctx):
    errs = {}
    x = np.linspace(-3, 3, 41)
    for lam in (0.5, 1.0, 2.0):
        a = abs(lam)
        s = np.sqrt(a) * x
        h = hermite_functions(14, s).real
        d2 = hermite_derivatives(hermite_derivatives(h))
        k = np.arange(d2.shape[0])[:, None]
        # H Phi_k in units of a^{5/4}; Phi_k = a^{1/4} h_k(sqrt(a) x)
        lhs = a * (-d2 + s ** 2 * h[: len(k)])
        rhs = (2 * k + 1) * a * h[: len(k)]
        errs[lam] = float(np.max(np.linalg.norm(lhs - rhs, axis=1) / np.linalg.norm(rhs, axis=1)))
    return Outcome({"relative_error": errs}, max(errs.values()))


def _fd_derivatives(f, X, h=1e-3):
    """Gradient and Laplacian of ``f`` on R^2 by fourth-order central differences."""
    c1 = np.array([1, -8, 8, -1]) / (12 * h)
    c2 = np.array([-1, 16, -30, 16, -1]) / (12 * h * h)
    grad, lap = [], 0
    for ax in range(2):
        e = np.zeros(2)
        e[ax] = h
        vals = {j: f(X + j * e) for j in (-2, -1, 0, 1, 2)}
        grad.append(sum(c * vals[j] for c, j in zip(c1, (-2, -1, 1, 2))))
        lap = lap + sum(c * vals[j] for c, j in zip(c2, (-2, -1, 0, 1, 2)))
    return grad, lap


def check_special_hermite_eigen(ctx):
    lam = ctx.lam
    a = abs(lam)
    g = np.linspace(-1.5, 1.5, 7)
    X = np.stack(np.meshgrid(g, g, indexing="ij"), -1).reshape(-1, 2)
    errs = []
    for al in range(3):
        for be in range(3):
            f = lambda P: matrix_elements([(al,)], [(be,)], lam, P[:, :1], P[:, 1:])[0, 0]
            v = f(X)
            (dx, du), lap = _fd_derivatives(f, X)
            x, u = X[:, 0], X[:, 1]
            base = -lap + 0.25 * lam * lam * (x * x + u * u) * v
            L = base - 1j * lam * (x * du - u * dx)
            errs.append(_rel(L, (2 * be + 1) * a * v))
            errs.append(_rel(2 * base, (2 * al + 2 * be + 2) * a * v))
    return Outcome({"max_relative_error": max(errs)}, max(errs))


def check_conjugation(ctx):
    rng = ctx.rng("conjugation")
    lam = ctx.lam
    b = BasisSpec(1, lam, 8, 32)
    z = rng.normal(size=(6, 1)) + 1j * rng.normal(size=(6, 1))
    V = hermite_basis_values(b, z)
    e1 = _rel(hermite_basis_values(b, np.conj(z)), np.conj(V))
    zeta = rng.normal(size=(6, 2)) + 1j * rng.normal(size=(6, 2)) * 0.5
    idx = b.indices[:5]
    E = matrix_elements(idx, idx, lam, zeta[:, :1], zeta[:, 1:])
    Ec = matrix_elements(idx, idx, lam, np.conj(zeta[:, :1]), np.conj(zeta[:, 1:]))
    Em = matrix_elements(idx, idx, lam, -zeta[:, :1], -zeta[:, 1:])
    # conj E_ab(conj zeta) = E_ba(-zeta)
    e2 = _rel(np.conj(Ec), np.transpose(Em, (1, 0, 2)))
    return Outcome({"hermite": e1, "special": e2}, max(e1, e2))


def check_quadrature_moments(ctx):
    Q = 32
    g = gauss_hermite(Q)
    t = g.nodes[:, 0]
    errs = [abs(tree_sum(g.weights * t ** (2 * m)) / gamma(m + 0.5) - 1) for m in range(Q)]
    return Outcome({"order": Q, "max_relative_error": max(errs)}, max(errs))


def check_quadrature_mass(ctx):
    errs = {}
    for n in (1, 2, 3):
        g = tensor_grid(*[gauss_hermite(12)] * n)
        errs[n] = abs(tree_sum(g.weights) / pi ** (n / 2) - 1)
    return Outcome({"relative_error": errs}, max(errs.values()))


# --------------------------------------------------------------------------
# Heisenberg group

def check_twisted_orthogonality(ctx):
    errs = {}
    pts = np.array([[0.3, -0.2], [-0.7, 0.5], [1.1, 0.4]])
    for lam in (0.5, 1.0):
        b = BasisSpec(1, lam, 3, 16)
        els = {(i, j): CoeffVector.basis_element(b, (i,), (j,)) for i in range(4) for j in range(4)}
        worst = 0.0
        for (a, bb), f in els.items():
            for (mu, nu), g in els.items():
                grid = twisted_convolve_at(lam, f.sampler(), g.sampler(), pts, order=24, check=False).values
                coeff = twisted_convolve_coeffs(f, g).evaluate(pts)
                worst = max(worst, float(np.max(np.abs(grid - coeff))))
        errs[lam] = worst
    return Outcome({"max_abs_error": errs}, max(errs.values()))


def check_weyl_homomorphism(ctx):
    rng = ctx.rng("weyl_homomorphism")
    b = BasisSpec(ctx.n, ctx.lam, 4, 32)
    errs = []
    for _ in range(10):
        f = CoeffVector.random(b, rng, terms=3, max_degree=2)
        g = CoeffVector.random(b, rng, terms=3, max_degree=2)
        W = weyl_transform(ctx.lam, twisted_convolve_coeffs(f, g).sampler(), b)
        errs.append(_rel(W.entries, (weyl_from_coeffs(f) @ weyl_from_coeffs(g)).entries))
    return Outcome({"max_relative_error": max(errs)}, max(errs))


def check_schrodinger_unitary(ctx):
    rng = ctx.rng("schrodinger_unitary")
    b = BasisSpec(ctx.n, ctx.lam, 30, 64)
    errs = []
    for _ in range(10):
        f = CoeffVector.random(b, rng, "hermite", terms=4, max_degree=3)
        x, y = 0.5 * rng.normal(size=ctx.n), 0.5 * rng.normal(size=ctx.n)
        r = schrodinger_act(ctx.lam, x, y, f)
        errs.append(abs(r.value.norm() - f.norm()) / f.norm())
    return Outcome({"max_norm_deviation": max(errs)}, max(errs))


def check_identity_commutes(ctx):
    rng = ctx.rng("identity_commutes")
    b = BasisSpec(ctx.n, ctx.lam, 8, 32)
    I = OperatorMatrix.identity(b)
    dev = 0.0
    for _ in range(5):
        S = schrodinger_matrix(ctx.lam, rng.normal(size=ctx.n), rng.normal(size=ctx.n), b)
        dev = max(dev, float(np.max(np.abs((I @ S).entries - (S @ I).entries))))
    return Outcome({"max_commutator": dev}, dev)


# --------------------------------------------------------------------------
# semigroups

def check_sandwich_coefficients(ctx):
    b = BasisSpec(ctx.n, ctx.lam, 4, 16)
    dev = 0.0
    for i, al in enumerate(b.indices):
        for j, be in enumerate(b.indices):
            if sum(al) + sum(be) > 4:
                continue
            f = CoeffVector.basis_element(b, al, be)
            s = sandwich(0.3, ctx.lam, f)
            h = hermite_semigroup(0.3, f)
            dev = max(dev, float(np.max(np.abs(s.coeffs - h.coeffs))))
    return Outcome({"max_abs_error": dev}, dev)


def check_sandwich_grid(ctx):
    rng = ctx.rng("sandwich_grid")
    lam = ctx.lam
    b = BasisSpec(1, lam, 3, 16)
    pre = FAULT_PREFACTOR if ctx.fault == "kernel-prefactor" else 1.0
    pts = rng.normal(size=(3, 2)) * 0.8
    errs = []
    for _ in range(2):
        f = CoeffVector.random(b, rng, terms=3, max_degree=2)
        g = sandwich(0.3, lam, f, engine="grid", order=24, kernel_prefactor=pre)
        ref = hermite_semigroup(0.3, f).evaluate(pts)
        errs.append(float(np.max(np.abs(g(pts) - ref)) / max(np.max(np.abs(ref)), 1e-300)))
    return Outcome({"relative_error": max(errs), "kernel_prefactor": pre}, max(errs))


def check_contraction(ctx):
    rng = ctx.rng("contraction")
    b = BasisSpec(ctx.n, ctx.lam, 8, 32)
    worst = -np.inf
    for _ in range(10):
        f = CoeffVector.random(b, rng, "hermite", terms=5)
        for t in (0.01, 0.1, 1.0):
            worst = max(worst, hermite_semigroup(t, f).norm() - f.norm())
    # deviation is the amount by which a norm grew, zero when all contract
    return Outcome({"max_norm_increase": worst}, max(worst, 0.0))


def check_laguerre_ratio(ctx):
    t, lam = 0.2, 1.0
    I = [laguerre_pairing(k, t, lam) for k in range(4)]
    r = [I[k + 1] / I[k] for k in range(3)]
    err = max(abs(x / np.exp(4 * t * lam) - 1) for x in r)
    return Outcome({"ratios": r}, err)


def check_laguerre_companion(ctx):
    t, lam = 0.2, 1.0
    J = [laguerre_pairing(k, t, lam, imaginary=False) for k in range(4)]
    r = [J[k + 1] / J[k] for k in range(3)]
    err = max(abs(x / np.exp(-4 * t * lam) - 1) for x in r)
    return Outcome({"ratios": r}, err)


# --------------------------------------------------------------------------
# Gauss-Bargmann transforms

def _random_poly(rng, deg=3):
    c = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
    return parse(" + ".join(f"({float(v.real)!r} + {float(v.imag)!r}*I)*xi**{k}" for k, v in enumerate(c)))


def check_gauss_bargmann_unitary(ctx):
    rng = ctx.rng("gauss_bargmann_unitary")
    g = gauss_hermite(32)
    ratios = []
    for _ in range(5):
        m = _random_poly(rng)
        mass = tree_sum(g.weights * np.abs(m(g.nodes)) ** 2).real
        ratios.append(fock_norm(gauss_bargmann_function(m)) / mass)
    return Outcome({"ratios": ratios}, spread(ratios), {"constant": float(np.mean(ratios))})


def check_symbol_recovery(ctx):
    rng = ctx.rng("symbol_recovery")
    a_shift = rng.normal(size=(4, 1)) * 1.5
    xi = rng.normal(size=(4, 1))
    errs = []
    for src, m in (("1", lambda x: np.ones(len(x))), ("exp(0.7*I*xi)", lambda x: np.exp(0.7j * x[:, 0]))):
        phi = gauss_bargmann_function(parse(src))
        for a, x in zip(a_shift, xi):
            got = recover_multiplier(phi, a, x[None, :])[0]
            want = m((x - a / 2)[None, :])[0] * np.exp(-x @ x)
            errs.append(abs(got - want))
    return Outcome({"max_abs_error": max(errs)}, max(errs))


def check_intertwining(ctx):
    rng = ctx.rng("intertwining")
    z = rng.normal(size=(5, 1)) + 1j * rng.normal(size=(5, 1))
    m = lambda x: np.cos(x[:, 0]) + x[:, 0]
    errs = []
    for w in (np.array([0.6 - 0.8j]), np.array([1j])):
        lhs = fock_action(w, gauss_bargmann_function(m, 1))(z)
        rhs = gauss_bargmann(multiplier_action(w, m), z, 1)
        errs.append(_rel(lhs, rhs))
    return Outcome({"max_relative_error": max(errs)}, max(errs))


def check_twisted_routes(ctx):
    rng = ctx.rng("twisted_routes")
    b = BasisSpec(ctx.n, ctx.lam, 12, 64)
    Z = (rng.normal(size=(5, 2 * ctx.n)) + 1j * rng.normal(size=(5, 2 * ctx.n))) * 0.7
    errs = []
    for _ in range(10):
        M = weyl_from_coeffs(CoeffVector.random(b, rng, terms=6, max_degree=5))
        t = twisted_gauss_bargmann(M, Z).values
        d = twisted_gauss_bargmann(M, Z, "density").values
        errs.append(_rel(t, d))
    return Outcome({"max_relative_error": max(errs)}, max(errs))


def check_plancherel(ctx):
    f = parse("exp(-x**2/2)*(1 + x)")
    ratios = []
    for y in (-2, -1, 0, 1, 2):
        lhs, rhs = plancherel_sides(f, [y])
        ratios.append(lhs / rhs)
    return Outcome({"ratios": ratios}, spread(ratios), {"constant": float(np.mean(ratios))})


# --------------------------------------------------------------------------
# Bergman identities

def _small_basis(ctx):
    return BasisSpec(1, ctx.lam, 4, 32)


def _ratio_check(ctx, name, fn, trials=5):
    rng = ctx.rng(name)
    b = _small_basis(ctx)
    reps = [fn(CoeffVector.random(b, rng, terms=4, max_degree=3)) for _ in range(trials)]
    ratios = [r.ratio for r in reps]
    tail = max(r.tail_bound / abs(r.lhs) for r in reps)
    return Outcome({"ratios": ratios}, spread(ratios), {"constant": float(np.mean(ratios))}, tail)


def check_hermite_bergman(ctx):
    return _ratio_check(ctx, "hermite_bergman", lambda f: bg.hermite_bergman(f, 0.3))


def check_special_hermite_bergman(ctx):
    return _ratio_check(ctx, "special_hermite_bergman", lambda f: bg.special_hermite_bergman(f, 0.3))


def check_mixed_semigroup_relation(ctx):
    return _ratio_check(ctx, "mixed_semigroup_relation", lambda f: bg.mixed_semigroup_relation(f, 0.2))


def check_weighted_spectral_identity(ctx):
    out = {}
    dev, tail = 0.0, 0.0
    for t in (0.2, 0.3, 0.4):
        o = _ratio_check(ctx, f"weighted_spectral_{t}", lambda f: bg.verify_weighted_spectral_identity(f, t))
        out[t] = o.measured["ratios"]
        dev, tail = max(dev, o.deviation), max(tail, o.tail_bound)
    return Outcome({"ratios": out}, dev, None, tail)


def check_gutzmer(ctx):
    rng = ctx.rng("gutzmer")
    b = BasisSpec(1, ctx.lam, 8, 32)
    ratios = []
    for _ in range(5):
        f = CoeffVector.random(b, rng, "hermite", terms=4, max_degree=6)
        for y, v in ((0.7, -0.3), (-0.4, 0.9)):
            lhs, rhs = bg.gutzmer_sides(f, y, v)
            ratios.append(lhs / rhs)
    return Outcome({"ratios": ratios}, spread(ratios), {"constant": float(np.mean(ratios))})


def check_half_time_bound(ctx):
    rng = ctx.rng("half_time_bound")
    b = _small_basis(ctx)
    l0, h0, _ = bg.half_time_bound(CoeffVector.basis_element(b, (0,), (0,)))
    d = np.exp(-(2 * b.degrees + b.n) * abs(b.lam))
    C = l0 / h0 * float(np.sum(d))
    excess, ratios = [], []
    for _ in range(5):
        lhs, hs, op = bg.half_time_bound(CoeffVector.random(b, rng, terms=4, max_degree=3))
        ratios.append(lhs / hs)
        excess.append(max(lhs / (C * op * op) - 1, 0.0))
    return Outcome({"hs_ratios": ratios, "bound_excess": excess},
                   max(max(excess), spread(ratios)), {"C": C, "hs_constant": l0 / h0})


def check_weight_consistency(ctx):
    rng = ctx.rng("weight_consistency")
    lam, n = ctx.lam, 1
    X = rng.normal(size=(20, 4)) * 0.8
    xi, eta = X[:, :2], X[:, 2:]
    ratios = []
    for t in (0.2, 0.3, 0.45):
        w = bg.WeightSpec("twisted_wt_lambda", t, lam, n)(xi, eta)
        U = bg.WeightSpec("hermite_Ut_lambda", t, lam, n)(xi, eta)
        p1 = twisted_heat_kernel(1.0, lam, xi + 1j * eta, n)
        r = w / (U * np.abs(p1) ** 2)
        ratios.append(spread(r))
    return Outcome({"spread_by_t": ratios}, max(ratios))


def check_hs_at_half(ctx):
    rng = ctx.rng("hs_at_half")
    b = BasisSpec(ctx.n, ctx.lam, 6, 16)
    errs = []
    for _ in range(10):
        E = rng.normal(size=(b.size, b.size)) + 1j * rng.normal(size=(b.size, b.size))
        M = OperatorMatrix(b, E)
        fro = float(np.sum(np.abs(E) ** 2))
        errs.append(abs(bg.spectral_sum(M, 0.5) - fro) / fro)
    return Outcome({"max_relative_error": max(errs)}, max(errs))


def check_classifier_reference(ctx):
    b = BasisSpec(ctx.n, ctx.lam, 16, 64)
    r1 = bg.classify(SymbolSpec("operator", OperatorMatrix.rank_one(b), ctx.lam, ctx.n))
    iv = bg.classify(SymbolSpec("operator", OperatorMatrix.identity(b), ctx.lam, ctx.n))
    exact = [bg.identity_sweep_exact(t, ctx.lam, ctx.n, 16) for t, _, _ in iv.t_sweep]
    sweep_err = _rel([v for _, v, _ in iv.t_sweep], exact)
    ok = r1.status == "sufficient-certified" and iv.status == "necessary-passed"
    return Outcome({"rank_one": r1.status, "identity": iv.status, "sweep_error": sweep_err},
                   sweep_err if ok else float("inf"))


def check_classifier_monotone(ctx):
    b = BasisSpec(ctx.n, ctx.lam, 16, 64)
    growth = np.diag(np.exp(0.3 * b.degrees)).astype(complex)
    symbols = [SymbolSpec("operator", OperatorMatrix(b, growth), ctx.lam, ctx.n),
               SymbolSpec("operator", OperatorMatrix.identity(b), ctx.lam, ctx.n),
               SymbolSpec("multiplier", parse("exp(xi**2/2)"), 0.0, 1),
               SymbolSpec("multiplier", parse("exp(-xi**2)"), 0.0, 1)]
    bad = 0
    statuses = []
    for s in symbols:
        v = bg.classify(s)
        statuses.append(v.status)
        div = [t for t, val, _ in v.t_sweep if np.isinf(val) or t in v.witnesses.get("diverging_t", [])]
        if div:
            later = [t for t, _, _ in v.t_sweep if t > min(div) and t < 0.5]
            bad += any(t not in div for t in later)
        bad += v.status == "sufficient-certified" and bool(div)
    return Outcome({"statuses": statuses, "violations": bad}, float(bad))


CHECKS = {
    "bargmann.gauss_bargmann_unitary": ("classical transform is unitary up to a constant", check_gauss_bargmann_unitary, 1e-3),
    "bargmann.intertwining": ("Fock translation intertwines multiplier translation", check_intertwining, 1e-8),
    "bargmann.plancherel": ("y-slice Plancherel identity", check_plancherel, 1e-3),
    "bargmann.symbol_recovery": ("symbol recovery from shifted slices", check_symbol_recovery, 1e-8),
    "bargmann.twisted_routes": ("twisted transform trace and density routes", check_twisted_routes, 1e-5),
    "bergman.classifier_monotone": ("classifier monotone consistency", check_classifier_monotone, 0.5),
    "bergman.classifier_reference": ("classifier on rank-one and identity", check_classifier_reference, 1e-12),
    "bergman.gutzmer": ("circle-averaged Gutzmer formula", check_gutzmer, 1e-3),
    "bergman.half_time_bound": ("half-time weighted norm bounded by operator norm", check_half_time_bound, 1e-3),
    "bergman.hermite_bergman": ("Hermite semigroup Bergman identity", check_hermite_bergman, 1e-3),
    "bergman.hs_at_half": ("spectral sum at t = 1/2 is the Hilbert-Schmidt norm", check_hs_at_half, 1e-12),
    "bergman.mixed_semigroup_relation": ("Hermite versus special Hermite weighted norms", check_mixed_semigroup_relation, 1e-3),
    "bergman.special_hermite_bergman": ("special Hermite semigroup Bergman identity", check_special_hermite_bergman, 1e-3),
    "bergman.weight_consistency": ("twisted weight equals U_t times |p_1|^2", check_weight_consistency, 1e-10),
    "bergman.weighted_spectral_identity": ("weighted integral equals spectral sum", check_weighted_spectral_identity, 1e-3),
    "heisen.identity_commutes": ("identity commutes with the representation", check_identity_commutes, 1e-15),
    "heisen.schrodinger_unitary": ("Schroedinger representation is unitary", check_schrodinger_unitary, 1e-6),
    "heisen.twisted_orthogonality": ("twisted convolution of special Hermite functions", check_twisted_orthogonality, 1e-5),
    "heisen.weyl_homomorphism": ("Weyl transform turns twisted convolution into products", check_weyl_homomorphism, 1e-6),
    "quad.mass": ("Gaussian mass", check_quadrature_mass, 1e-12),
    "quad.moments": ("Gauss-Hermite moment exactness", check_quadrature_moments, 1e-12),
    "semigrp.contraction": ("Hermite semigroup is a contraction", check_contraction, 1e-15),
    "semigrp.laguerre_companion": ("Laguerre pairing at real arguments", check_laguerre_companion, 1e-6),
    "semigrp.laguerre_ratio": ("Laguerre pairing ratio law", check_laguerre_ratio, 1e-4),
    "semigrp.sandwich_coefficients": ("heat sandwich equals Hermite semigroup", check_sandwich_coefficients, 1e-12),
    "semigrp.sandwich_grid": ("heat sandwich equals Hermite semigroup", check_sandwich_grid, 1e-5),
    "specfun.conjugation": ("Schwarz reflection of (special) Hermite functions", check_conjugation, 1e-12),
    "specfun.hermite_eigenrelation": ("Hermite functions are eigenfunctions", check_hermite_eigenrelation, 1e-6),
    "specfun.hermite_orthonormality": ("Hermite functions are orthonormal", check_hermite_orthonormality, 1e-8),
    "specfun.special_hermite_eigen": ("special Hermite joint eigenfunctions", check_special_hermite_eigen, 1e-5),
}
ANCHORS = frozenset(a for a, _, _ in CHECKS.values())


def run_check(name, ctx, tolerances=None, timings=True):
    anchor, fn, tol = CHECKS[name]
    tol = (tolerances or {}).get(name, tol)
    t0 = time.perf_counter()
    out = fn(ctx)
    dt = time.perf_counter() - t0
    return ReportRecord(name, anchor, out.measured, out.constants or {}, tol, float(out.deviation),
                        float(out.tail_bound), runtime=dt if timings else None)


def run_suite(ctx, names=None, tolerances=None, workers=1):
    """Run the named checks (all by default); records come back sorted by name."""
    names = sorted(names or CHECKS)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown checks {unknown}")
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            recs = list(ex.map(lambda n: run_check(n, ctx, tolerances), names))
    else:
        recs = [run_check(n, ctx, tolerances) for n in names]
    return sorted(recs, key=lambda r: r.test_name)
