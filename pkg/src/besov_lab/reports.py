"""Check reports, canonical JSON, and CSV emission.

Report files must be byte-identical across runs with the same config, so all
serialization here is canonical: sorted keys, no whitespace variance, floats
via their shortest round-trip repr, rows sorted.  Nothing time- or
environment-dependent is ever written.
"""
from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field

from .grids import ModulusCurve

VERDICTS = ("pass", "fail", "inconclusive", "error")


@dataclass
class CheckReport:
    """One verified inequality: lhs <= rhs up to tolerance, or a diagnostic."""

    id: str
    statement: str
    lhs: float
    rhs: float
    verdict: str
    tol: float = 0.0
    tail_flags: tuple[str, ...] = ()
    extras: dict = field(default_factory=dict)

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "statement": self.statement,
            "lhs": _json_num(self.lhs),
            "rhs": _json_num(self.rhs),
            "slack": _json_num(self.slack),
            "tol": _json_num(self.tol),
            "verdict": self.verdict,
            "tail_flags": list(self.tail_flags),
            "extras": _jsonable(self.extras),
        }


def check(
    id: str,
    statement: str,
    lhs: float,
    rhs: float,
    tol: float = 0.0,
    tail_flags: tuple[str, ...] = (),
    inconclusive: bool = False,
    extras: dict | None = None,
) -> CheckReport:
    """Build a pass/fail report for the inequality lhs <= rhs + tol."""
    if inconclusive:
        verdict = "inconclusive"
    else:
        verdict = "pass" if lhs <= rhs + tol else "fail"
    return CheckReport(
        id=id,
        statement=statement,
        lhs=float(lhs),
        rhs=float(rhs),
        verdict=verdict,
        tol=float(tol),
        tail_flags=tuple(tail_flags),
        extras=extras or {},
    )


def error_report(id: str, statement: str, message: str) -> CheckReport:
    return CheckReport(
        id=id,
        statement=statement,
        lhs=math.nan,
        rhs=math.nan,
        verdict="error",
        extras={"message": message},
    )


def _json_num(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float):
        return _json_num(obj)
    if isinstance(obj, (int, str, bool)) or obj is None:
        return obj
    if hasattr(obj, "item"):
        return _jsonable(obj.item())
    return str(obj)


def canonical_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, separators=(",", ":"))


def config_hash(config: dict) -> str:
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()


def aggregate_verdict(checks: list[CheckReport], strict: bool = False) -> bool:
    """True when every check passed; --strict also demotes inconclusive."""
    bad = {"fail", "error"}
    if strict:
        bad.add("inconclusive")
    return all(c.verdict not in bad for c in checks)


def write_report(path, suite: str, config: dict, checks: list[CheckReport]) -> None:
    doc = {
        "suite": suite,
        "config_hash": config_hash(config),
        "checks": [c.to_dict() for c in checks],
    }
    with open(path, "w", newline="\n") as fh:
        fh.write(canonical_json(doc))
        fh.write("\n")


def write_summary_csv(path, checks: list[CheckReport]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "verdict", "lhs", "rhs", "slack", "tol", "statement"])
        for c in checks:
            writer.writerow(
                [
                    c.id,
                    c.verdict,
                    repr(float(c.lhs)),
                    repr(float(c.rhs)),
                    repr(float(c.slack)),
                    repr(float(c.tol)),
                    c.statement,
                ]
            )


def emit_curve_data(curve: ModulusCurve, path) -> None:
    """CSV with rows (eps, value, bound, kind), lexicographically sorted."""
    rows = sorted(
        (repr(float(e)), repr(float(v)), curve.bound, curve.kind)
        for e, v in zip(curve.eps, curve.values)
    )
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["eps", "value", "bound", "kind"])
        writer.writerows(rows)


def read_curve_csv(path) -> ModulusCurve:
    eps, values, bound, kind = [], [], "exact", "omega"
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            eps.append(float(row["eps"]))
            values.append(float(row["value"]))
            bound, kind = row["bound"], row["kind"]
    order = sorted(range(len(eps)), key=lambda i: eps[i])
    return ModulusCurve(
        [eps[i] for i in order], [values[i] for i in order], kind, bound
    )
