"""JSON/CSV rendering of results; exact rationals travel as ``"num/den"`` strings."""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from importlib import resources
from typing import Any

from urnlab.limits import LimitMomentReport
from urnlab.model import UrnSpec, validate_tenability
from urnlab.moments import MomentTable

MOMENT_CSV_HEADER = ("n", "s", "shifted", "numerator", "denominator", "decimal", "raw", "raw_decimal")
LIMIT_CSV_HEADER = ("s", "prefactor", "series_sum", "truncation_n", "tail_estimate", "E_s", "W_infty_moment")


def fraction_str(q: Fraction | int) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_fraction(text: str) -> Fraction:
    return Fraction(text)


def rational(q: Fraction | int) -> dict:
    q = Fraction(q)
    return {"value": fraction_str(q), "decimal": float(q)}


def finite(x: float) -> float | None:
    """JSON has no inf/nan; map them to null."""
    return x if math.isfinite(x) else None


def classify_record(spec: UrnSpec) -> dict:
    report = validate_tenability(spec)
    return {**spec.describe(), "tenability": {"ok": report.ok, "violations": list(report.violations)}}


def moments_record(table: MomentTable) -> dict:
    return {
        "spec": table.spec.to_dict(),
        "shift": rational(table.shift),
        "N": table.N,
        "S": table.S,
        "entries": [
            {"n": n, "s": s, "shifted": rational(sh), "raw": rational(raw)} for n, s, sh, raw in table.rows()
        ],
    }


def moments_csv(table: MomentTable) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(MOMENT_CSV_HEADER)
    for n, s, sh, raw in table.rows():
        out.writerow([n, s, fraction_str(sh), sh.numerator, sh.denominator, repr(float(sh)),
                      fraction_str(raw), repr(float(raw))])
    return buf.getvalue()


def limits_record(report: LimitMomentReport) -> dict:
    var = report.variance
    records = []
    for rec in report.records():
        records.append({k: (finite(v) if isinstance(v, float) else v) for k, v in rec.items()})
    return {
        "spec": report.spec.to_dict(),
        "class": report.spec.urn_class.value,
        "converged": report.converged,
        "variance_check": None if var is None else finite(var),
        "records": records,
    }


def limits_csv(report: LimitMomentReport) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(LIMIT_CSV_HEADER)
    for rec in report.records():
        out.writerow([rec[k] for k in LIMIT_CSV_HEADER])
    return buf.getvalue()


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, allow_nan=False) + "\n"


def load_schema(name: str) -> dict:
    """Shipped JSON schema ``schemas/<name>.schema.json``."""
    text = resources.files("urnlab").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)
