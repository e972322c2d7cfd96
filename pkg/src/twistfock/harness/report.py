"""CSV and JSON export.

Floats are written with ``repr``, which round-trips exactly, so identical
inputs give byte-identical files.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

SCHEMA_VERSION = "1.0"


@dataclass
class ReportRecord:
    test_name: str
    anchor: str
    measured: dict
    constants: dict
    tolerance: float
    deviation: float
    tail_bound: float = 0.0
    passed: bool = False
    runtime: float | None = None

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        self.passed = bool(np.isfinite(self.deviation) and self.deviation + self.tail_bound <= self.tolerance)


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in sorted(x.items(), key=lambda kv: str(kv[0]))}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": _jsonable(x.real), "im": _jsonable(x.imag)}
    if isinstance(x, (float, np.floating)):
        x = float(x)
        # JSON has no inf/nan
        return x if math.isfinite(x) else str(x)
    return x


def dumps_json(kind, payload):
    doc = {"schema": f"twistfock.{kind}", "version": SCHEMA_VERSION, **_jsonable(payload)}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_json(path, kind, payload):
    Path(path).write_text(dumps_json(kind, payload))


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def write_csv(path, header, rows):
    Path(path).write_text(csv_text(header, rows))


def transform_rows(points, values, tails):
    points = np.atleast_2d(points)
    for p, v, t in zip(points, values, tails):
        yield [*p.real, *p.imag, complex(v).real, complex(v).imag, float(t)]


def transform_header(dim):
    return [f"re{i + 1}" for i in range(dim)] + [f"im{i + 1}" for i in range(dim)] + ["value_re", "value_im", "tail_bound"]


def records_payload(records, config, timings=False):
    out = []
    for r in sorted(records, key=lambda r: r.test_name):
        d = asdict(r)
        if not timings:
            d.pop("runtime")
        out.append(d)
    return {"config": config, "records": out,
            "summary": {"total": len(out), "failed": sum(not r["passed"] for r in out)}}


def records_csv(records, timings=False):
    header = ["test_name", "anchor", "deviation", "tail_bound", "tolerance", "passed"]
    if timings:
        header.append("runtime")
    rows = []
    for r in sorted(records, key=lambda r: r.test_name):
        row = [r.test_name, r.anchor, r.deviation, r.tail_bound, r.tolerance, r.passed]
        if timings:
            row.append(r.runtime)
        rows.append(row)
    return csv_text(header, rows)


def verdict_payload(verdict):
    d = asdict(verdict)
    d["t_sweep"] = [{"t": t, "norm": v, "tail_bound": e} for t, v, e in verdict.t_sweep]
    d["a_sweep"] = [{"a": list(a), "condition_i": c1, "condition_ii": c2, "strong_l1": s}
                    for a, c1, c2, s in verdict.a_sweep]
    return d
