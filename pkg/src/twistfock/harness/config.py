"""YAML run configuration.

Example::

    n: 1
    lambda: 1.0
    max_degree: 16
    quad_order: 64
    seed: 7
    t_grid: [0.1, 0.3, 0.5]
    symbol:
      kind: operator
      matrix: identity
    grid:
      box: {re: [-1, 1, 3], im: [0, 0, 1]}

Errors carry the offending field path and the line it appears on.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from ..bargmann import EntireFunction, SymbolSpec
from ..bergman import DEFAULT_T_GRID, default_a_grid
from ..expr import ExpressionError, parse
from ..heisen import CoeffVector, OperatorMatrix
from ..specfun import BasisSpec

OUTPUT_ENV = "TWISTFOCK_OUTPUT_DIR"
TOP_KEYS = {"n", "lambda", "max_degree", "quad_order", "seed", "t_grid", "a_grid",
            "tolerances", "output", "symbol", "grid"}


class ConfigError(ValueError):
    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if field:
            where.append(f"field '{field}'")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


@dataclass
class RunConfig:
    basis: BasisSpec
    lam: float = 1.0
    symbol: SymbolSpec | None = None
    t_grid: tuple = DEFAULT_T_GRID
    a_grid: list | None = None
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    output_dir: Path = Path(".")
    grid: np.ndarray | None = None

    def __post_init__(self):
        for k, v in self.tolerances.items():
            if not v > 0:
                raise ConfigError("tolerances must be positive", f"tolerances.{k}")

    @property
    def n(self):
        return self.basis.n



def default_output_dir():
    return Path(os.environ.get(OUTPUT_ENV, "."))


class _Doc:
    """Parsed YAML plus line lookup by field path."""

    def __init__(self, text):
        try:
            self.node = yaml.compose(text)
            self.data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            raise ConfigError(f"invalid YAML: {getattr(exc, 'problem', exc)}",
                              line=mark.line + 1 if mark else None) from exc
        if self.data is None:
            self.data = {}
        if not isinstance(self.data, dict):
            raise ConfigError("top level must be a mapping", line=1)

    def line(self, path):
        node = self.node
        for key in path:
            if isinstance(node, yaml.MappingNode):
                match = [v for k, v in node.value if k.value == key]
                if not match:
                    return node.start_mark.line + 1
                node = match[0]
            elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
                node = node.value[key]
            else:
                break
        return node.start_mark.line + 1 if node is not None else None

    def error(self, path, message):
        return ConfigError(message, ".".join(map(str, path)), self.line(path))


def _number(doc, path, value, kind=float, positive=False):
    try:
        out = kind(value)
    except (TypeError, ValueError):
        raise doc.error(path, f"expected {kind.__name__}, got {value!r}") from None
    if kind is int and float(value) != out:
        raise doc.error(path, f"expected an integer, got {value!r}")
    if positive and not out > 0:
        raise doc.error(path, "must be positive")
    return out


def _complex(doc, path, value):
    try:
        return complex(str(value).replace(" ", "").replace("i", "j").replace("I", "j"))
    except ValueError:
        raise doc.error(path, f"not a complex number: {value!r}") from None


def load_config(source, overrides=None):
    """Read a config from a Path or YAML text and apply CLI overrides."""
    text = source.read_text() if isinstance(source, Path) else (source or "")
    doc = _Doc(text)
    return build_config(doc, overrides or {})


def build_config(doc, overrides):
    d = dict(doc.data)
    for k in d:
        if k not in TOP_KEYS:
            raise doc.error((k,), "unknown field")
    d.update({k: v for k, v in overrides.items() if v is not None})
    n = _number(doc, ("n",), d.get("n", 1), int, positive=True)
    lam = _number(doc, ("lambda",), d.get("lambda", 1.0))
    N = _number(doc, ("max_degree",), d.get("max_degree", 16), int)
    Q = _number(doc, ("quad_order",), d.get("quad_order", max(64, 2 * N + 2)), int, positive=True)
    seed = _number(doc, ("seed",), d.get("seed", 0), int)
    try:
        # lambda = 0 runs use a unit-scale basis only for bookkeeping
        basis = BasisSpec(n, lam if lam != 0 else 1.0, N, Q)
    except ValueError as exc:
        raise doc.error(("max_degree",), str(exc)) from None
    t_raw = d.get("t_grid", list(DEFAULT_T_GRID))
    if not isinstance(t_raw, (list, tuple)):
        raise doc.error(("t_grid",), "expected a list")
    t_grid = tuple(_number(doc, ("t_grid", i), t) for i, t in enumerate(t_raw))
    for i, t in enumerate(t_grid):
        if not 0 < t <= 0.5:
            raise doc.error(("t_grid", i), "t must lie in (0, 1/2]")
    a_grid = None
    if "a_grid" in d:
        a = d["a_grid"]
        if not isinstance(a, dict):
            raise doc.error(("a_grid",), "expected a mapping with radius and points")
        a_grid = default_a_grid(n, _number(doc, ("a_grid", "radius"), a.get("radius", 8.0), positive=True),
                                _number(doc, ("a_grid", "points"), a.get("points", 17), int, positive=True))
    tol = d.get("tolerances", {}) or {}
    if not isinstance(tol, dict):
        raise doc.error(("tolerances",), "expected a mapping")
    tolerances = {k: _number(doc, ("tolerances", k), v, positive=True) for k, v in tol.items()}
    out = d.get("output", {}) or {}
    out_dir = Path(out.get("dir")) if isinstance(out, dict) and out.get("dir") else default_output_dir()
    symbol = _symbol(doc, d.get("symbol"), basis, lam) if d.get("symbol") is not None else None
    grid = _grid(doc, d.get("grid"), 2 * n if lam != 0 else n) if d.get("grid") is not None else None
    return RunConfig(basis, lam, symbol, t_grid, a_grid, tolerances, seed, out_dir, grid)


def _symbol(doc, s, basis, lam):
    path = ("symbol",)
    if not isinstance(s, dict) or "kind" not in s:
        raise doc.error(path, "expected a mapping with a 'kind'")
    kind = s["kind"]
    n = basis.n
    try:
        if kind == "multiplier" or (kind == "density" and lam == 0):
            if lam != 0 and kind == "multiplier":
                raise doc.error(path + ("kind",), "multipliers need lambda = 0")
            if "expr" not in s:
                raise doc.error(path, "missing 'expr'")
            return SymbolSpec(kind, _expr(doc, path + ("expr",), s["expr"], n), 0.0, n)
        if kind == "entire":
            dim = n if lam == 0 else 2 * n
            e = _expr(doc, path + ("expr",), s.get("expr"), dim)
            growth = [(t.A, t.b) for t in e.terms]
            return SymbolSpec("entire", EntireFunction(e, dim, 0.0, growth, e.source), lam, n)
        if lam == 0:
            raise doc.error(path + ("kind",), f"kind {kind!r} needs lambda != 0")
        if kind == "density":
            return SymbolSpec("density", _coeffs(doc, path + ("coeffs",), s.get("coeffs"), basis), lam, n,
                              {"exact": True})
        if kind == "operator":
            return SymbolSpec("operator", _matrix(doc, path + ("matrix",), s.get("matrix"), basis), lam, n,
                              {"exact": s.get("exact", _matrix_exact(s.get("matrix")))})
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise doc.error(path, str(exc)) from None
    raise doc.error(path + ("kind",), f"unknown symbol kind {kind!r}")


def _matrix_exact(m):
    # the identity is a truncation of an infinite-rank operator
    return not (m == "identity" or (isinstance(m, dict) and "diag" in m))


def _expr(doc, path, text, n):
    if text is None:
        raise doc.error(path, "missing expression")
    try:
        return parse(text, n)
    except ExpressionError as exc:
        raise doc.error(path, str(exc)) from None


def _coeffs(doc, path, items, basis):
    if not isinstance(items, list):
        raise doc.error(path, "expected a list of {alpha, beta, value}")
    c = np.zeros((basis.size, basis.size), dtype=complex)
    for i, it in enumerate(items):
        p = path + (i,)
        if not isinstance(it, dict) or not {"alpha", "beta"} <= set(it):
            raise doc.error(p, "each entry needs alpha, beta and value")
        try:
            a = basis.position(tuple(it["alpha"]) if isinstance(it["alpha"], list) else (it["alpha"],))
            b = basis.position(tuple(it["beta"]) if isinstance(it["beta"], list) else (it["beta"],))
        except (KeyError, ValueError, TypeError) as exc:
            raise doc.error(p, f"index outside the basis: {exc}") from None
        c[a, b] += _complex(doc, p + ("value",), it.get("value", 1))
    return CoeffVector(basis, c, "special", exact=True)


def _matrix(doc, path, m, basis):
    S = basis.size
    if m == "identity":
        return OperatorMatrix.identity(basis)
    if m == "zero":
        return OperatorMatrix.zeros(basis)
    if m == "rank_one":
        return OperatorMatrix.rank_one(basis)
    if isinstance(m, dict) and "diag" in m:
        d = m["diag"]
        if not isinstance(d, list) or len(d) > S:
            raise doc.error(path + ("diag",), f"expected at most {S} diagonal entries")
        e = np.zeros((S, S), dtype=complex)
        for i, v in enumerate(d):
            e[i, i] = _complex(doc, path + ("diag", i), v)
        return OperatorMatrix(basis, e)
    if isinstance(m, dict) and "rows" in m:
        rows = m["rows"]
        if not isinstance(rows, list) or len(rows) > S:
            raise doc.error(path + ("rows",), f"expected at most {S} rows")
        e = np.zeros((S, S), dtype=complex)
        for i, r in enumerate(rows):
            if not isinstance(r, list) or len(r) > S:
                raise doc.error(path + ("rows", i), f"expected a row of at most {S} entries")
            for j, v in enumerate(r):
                e[i, j] = _complex(doc, path + ("rows", i, j), v)
        return OperatorMatrix(basis, e)
    raise doc.error(path, "matrix must be identity, zero, rank_one, {diag: [...]} or {rows: [[...]]}")


def _grid(doc, g, dim):
    path = ("grid",)
    if not isinstance(g, dict):
        raise doc.error(path, "expected a mapping with 'points' or 'box'")
    if "points" in g:
        pts = g["points"] or []
        out = np.zeros((len(pts), dim), dtype=complex)
        for i, p in enumerate(pts):
            p = p if isinstance(p, list) else [p]
            if len(p) != dim:
                raise doc.error(path + ("points", i), f"expected {dim} coordinates")
            out[i] = [_complex(doc, path + ("points", i, j), v) for j, v in enumerate(p)]
        return out
    if "box" in g:
        box = g["box"]
        axes = []
        for part in ("re", "im"):
            spec = box.get(part, [0, 0, 1]) if isinstance(box, dict) else None
            if not (isinstance(spec, list) and len(spec) == 3):
                raise doc.error(path + ("box", part), "expected [lo, hi, count]")
            lo, hi = (_number(doc, path + ("box", part), v) for v in spec[:2])
            cnt = _number(doc, path + ("box", part), spec[2], int)
            if cnt < 0:
                raise doc.error(path + ("box", part), "count must be non-negative")
            axes.append(np.linspace(lo, hi, cnt))
        re, im = np.meshgrid(*axes, indexing="ij")
        z = (re + 1j * im).ravel()
        # same value in every coordinate keeps the grid one-dimensional
        return np.repeat(z[:, None], dim, axis=1)
    raise doc.error(path, "expected 'points' or 'box'")
