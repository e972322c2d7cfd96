"""``twistfock`` command line: transform, classify, verify, sweep."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from ..bargmann import curly_g, gauss_bargmann, twisted_gauss_bargmann
from ..bergman import classify
from ..expr import ExpressionError
from .config import ConfigError, load_config
from .report import (
    csv_text,
    dumps_json,
    records_csv,
    records_payload,
    transform_header,
    transform_rows,
    verdict_payload,
)
from .suite import CHECKS, FAULTS, Context, run_suite


def _t_grid(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad t-grid {text!r}") from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML run configuration")
    common.add_argument("--n", type=int, help="spatial dimension")
    common.add_argument("--lam", type=float, help="scale lambda (0 for the classical case)")
    common.add_argument("--N", dest="max_degree", type=int, help="truncation degree")
    common.add_argument("--Q", dest="quad_order", type=int, help="quadrature order")
    common.add_argument("--t-grid", type=_t_grid, help="comma separated t values in (0, 1/2]")
    common.add_argument("--seed", type=int, help="seed for random inputs")
    common.add_argument("--output", "-o", help="output file ('-' for stdout)")

    sym = argparse.ArgumentParser(add_help=False)
    sym.add_argument("--kind", choices=("multiplier", "density", "operator", "entire"), help="symbol kind")
    sym.add_argument("--expr", help="closed-form expression for the symbol")
    sym.add_argument("--matrix", choices=("identity", "zero", "rank_one"), help="named operator matrix")

    p = argparse.ArgumentParser(prog="twistfock", description="Twisted Fock space transforms and weighted norms")
    sub = p.add_subparsers(dest="command", required=True)
    t = sub.add_parser("transform", parents=[common, sym], help="evaluate the Gauss-Bargmann transform of a symbol")
    t.add_argument("--points", help="semicolon separated points, coordinates comma separated, e.g. '1+1j;0.5'")
    sub.add_parser("classify", parents=[common, sym], help="weighted-norm verdict for a symbol (JSON)")
    sub.add_parser("sweep", parents=[common, sym], help="weighted norms over the t-grid (CSV)")
    v = sub.add_parser("verify", parents=[common], help="run the identity suite")
    v.add_argument("--fault", choices=FAULTS, help="inject a deliberate fault")
    v.add_argument("--timings", action="store_true", help="include runtimes (makes reports non-reproducible)")
    v.add_argument("--workers", type=int, default=1, help="threads for independent checks")
    v.add_argument("--check", action="append", choices=sorted(CHECKS), help="run only this check (repeatable)")
    v.add_argument("--csv", help="also write a CSV summary here")
    return p


def _config(args):
    over = {"n": args.n, "lambda": args.lam, "max_degree": args.max_degree, "quad_order": args.quad_order,
            "seed": args.seed, "t_grid": args.t_grid}
    sym = _symbol_override(args)
    if sym is not None:
        over["symbol"] = sym
    if getattr(args, "points", None) is not None:
        over["grid"] = {"points": [p.split(",") for p in args.points.split(";") if p.strip()]}
    text = args.config.read_text() if args.config else ""
    return load_config(text, over)


def _symbol_override(args):
    kind = getattr(args, "kind", None)
    expr = getattr(args, "expr", None)
    matrix = getattr(args, "matrix", None)
    if kind is None and expr is None and matrix is None:
        return None
    if matrix is not None:
        return {"kind": kind or "operator", "matrix": matrix}
    lam = args.lam if args.lam is not None else None
    return {"kind": kind or ("multiplier" if not lam else "entire"), "expr": expr}


def _write(dest, text, default_name, cfg):
    if dest == "-":
        sys.stdout.write(text)
        return None
    path = Path(dest) if dest else cfg.output_dir / default_name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def _need_symbol(cfg):
    if cfg.symbol is None:
        raise ConfigError("no symbol given", "symbol")
    return cfg.symbol


def transform_values(cfg):
    """Points, values and tail bounds of the transform named by the config."""
    s = _need_symbol(cfg)
    dim = cfg.n if s.lam == 0 else 2 * cfg.n
    pts = cfg.grid if cfg.grid is not None else np.zeros((0, dim), dtype=complex)
    if pts.shape[1] != dim:
        raise ConfigError(f"grid points need {dim} coordinates", "grid")
    if s.kind == "entire":
        vals = s.payload(pts) if len(pts) else np.zeros(0, dtype=complex)
        return pts, vals, np.zeros(len(pts))
    if s.lam == 0:
        fn = gauss_bargmann if s.kind == "multiplier" else curly_g
        vals = fn(s.payload, pts, cfg.n) if len(pts) else np.zeros(0, dtype=complex)
        return pts, vals, np.zeros(len(pts))
    tv = twisted_gauss_bargmann(s.operator(), pts)
    return pts, tv.values, tv.tail_bound


def cmd_transform(args):
    cfg = _config(args)
    pts, vals, tails = transform_values(cfg)
    text = csv_text(transform_header(pts.shape[1]), transform_rows(pts, vals, tails))
    _write(args.output, text, "transform.csv", cfg)
    return 0


def _classify(cfg):
    return classify(_need_symbol(cfg), cfg.t_grid, cfg.a_grid)


def _config_summary(cfg):
    return {"n": cfg.n, "lambda": cfg.lam, "max_degree": cfg.basis.max_degree,
            "quad_order": cfg.basis.quad_order, "seed": cfg.seed, "t_grid": list(cfg.t_grid)}


def cmd_classify(args):
    cfg = _config(args)
    v = _classify(cfg)
    payload = {"config": _config_summary(cfg), "verdict": verdict_payload(v)}
    _write(args.output, dumps_json("verdict", payload), "verdict.json", cfg)
    print(v.status, file=sys.stderr)
    return 0


def cmd_sweep(args):
    cfg = _config(args)
    v = _classify(cfg)
    text = csv_text(["t", "norm", "tail_bound"], v.t_sweep)
    _write(args.output, text, "sweep.csv", cfg)
    return 0


def cmd_verify(args):
    cfg = _config(args)
    ctx = Context(cfg.n, cfg.lam, cfg.seed, args.fault)
    records = run_suite(ctx, args.check, cfg.tolerances, args.workers)
    summary = _config_summary(cfg)
    summary["fault"] = args.fault
    payload = records_payload(records, summary, args.timings)
    _write(args.output, dumps_json("verify", payload), "verify.json", cfg)
    if args.csv:
        _write(args.csv, records_csv(records, args.timings), "verify.csv", cfg)
    for r in records:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.test_name} deviation={r.deviation:.3g} "
              f"tolerance={r.tolerance:g}", file=sys.stderr)
    return 0 if all(r.passed for r in records) else 1


COMMANDS = {"transform": cmd_transform, "classify": cmd_classify, "sweep": cmd_sweep, "verify": cmd_verify}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ExpressionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
