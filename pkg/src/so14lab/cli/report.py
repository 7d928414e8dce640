"""Verification reports: cases, JSON schema, deterministic atomic output."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import platform
import tempfile
from dataclasses import dataclass, field

import numpy as np

SCHEMA_VERSION = 1
SIGNIFICANT_DIGITS = 10
RULES = ("le", "ge", "below", "within", "report")

# field -> allowed JSON types (None allowed where listed)
CASE_FIELDS = {
    "id": (str,),
    "paper_ref": (str,),
    "residual": (float, int, str, type(None)),
    "value": (float, int, str, list, type(None)),
    "tolerance": (float, int, type(None)),
    "rule": (str,),
    "pass": (bool,),
}
REPORT_FIELDS = {
    "schema_version": (int,),
    "suite": (str,),
    "seed": (int,),
    "pass": (bool,),
    "summary": (dict,),
    "cases": (list,),
    "environment": (dict,),
    "plots": (list,),
}


def clean(x):
    """JSON-ready copy with floats rounded to ``SIGNIFICANT_DIGITS`` digits.

    Rounding keeps reports byte-identical when the last bits of a residual
    depend on the BLAS build.  Non-finite floats become strings.
    """
    if isinstance(x, dict):
        return {str(k): clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return [clean(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return str(x)
        return float(f"{x:.{SIGNIFICANT_DIGITS - 1}e}")
    if isinstance(x, complex):
        return [clean(x.real), clean(x.imag)]
    return x


@dataclass
class Case:
    """One checked quantity.

    ``rule`` says how ``pass`` was decided: ``le`` (residual <= tolerance),
    ``ge`` (value >= tolerance), ``below`` (value <= tolerance), ``within``
    (residual = |value - target| <= tolerance) or ``report`` (informational,
    always passes).
    """

    id: str
    paper_ref: str
    residual: float | None
    tolerance: float | None
    rule: str = "le"
    value: object = None
    passed: bool | None = None

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"unknown rule {self.rule!r}")
        if self.passed is None:
            self.passed = self._decide()

    def _decide(self) -> bool:
        if self.rule == "report":
            return True
        if self.rule == "ge":
            return self.value is not None and float(self.value) >= self.tolerance
        if self.rule == "below":
            return self.value is not None and float(self.value) <= self.tolerance
        r = self.residual
        return r is not None and math.isfinite(r) and r <= self.tolerance

    def to_dict(self) -> dict:
        return {"id": self.id, "paper_ref": self.paper_ref, "residual": self.residual,
                "value": self.value, "tolerance": self.tolerance, "rule": self.rule,
                "pass": bool(self.passed)}


def le(id, ref, residual, tol, value=None) -> Case:
    return Case(id, ref, float(residual), float(tol), "le", value)


def ge(id, ref, value, minimum) -> Case:
    return Case(id, ref, None, float(minimum), "ge", value)


def info(id, ref, value=None, residual=None) -> Case:
    return Case(id, ref, None if residual is None else float(residual), None, "report", value)


def within(id, ref, value, target, tol, relative=False) -> Case:
    """``|value - target| <= tol`` (relative to ``|target|`` when ``relative``)."""
    d = abs(float(value) - float(target))
    if relative:
        d /= abs(float(target))
    return Case(id, ref, d, float(tol), "within", float(value))


@dataclass
class PlotData:
    """Columns for a CSV export and a figure rendered next to the report."""

    name: str
    columns: dict
    title: str = ""
    x: str | None = None
    y: tuple = ()
    logx: bool = False
    logy: bool = False
    kind: str = "line"


@dataclass
class VerificationReport:
    suite: str
    cases: list
    environment: dict
    seed: int
    plots: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def to_dict(self) -> dict:
        n_fail = sum(not c.passed for c in self.cases)
        return clean({
            "schema_version": SCHEMA_VERSION,
            "suite": self.suite,
            "seed": self.seed,
            "pass": self.passed,
            "summary": {"cases": len(self.cases), "failed": n_fail},
            "cases": [c.to_dict() for c in self.cases],
            "environment": self.environment,
            "plots": sorted(p.name for p in self.plots),
        })


def environment(config_data: dict, extra: dict | None = None) -> dict:
    """Effective config plus library versions (no host names, no timestamps)."""
    import matplotlib
    import scipy

    from .. import __version__

    env = {"config": config_data,
           "versions": {"so14lab": __version__, "numpy": np.__version__,
                        "scipy": scipy.__version__, "matplotlib": matplotlib.__version__,
                        "python": platform.python_version()}}
    if extra:
        env.update(extra)
    return env


def dumps(data: dict) -> str:
    return json.dumps(clean(data), sort_keys=True, indent=2, allow_nan=False) + "\n"


def atomic_write(path, text: str | bytes) -> None:
    """Write through a temporary file in the same directory, then rename."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    mode = "wb" if isinstance(text, bytes) else "w"
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"encoding": "utf-8",
                                                              "newline": ""})) as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(columns: dict) -> str:
    """Columns of equal length as CSV with ``repr``-exact floats."""
    names = list(columns)
    cols = [np.asarray(columns[n]) for n in names]
    n = {c.shape[0] for c in cols}
    if len(n) != 1:
        raise ValueError("CSV columns must have equal length")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for row in zip(*cols):
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def cases_csv(report: VerificationReport) -> str:
    rows = [c.to_dict() for c in report.cases]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(CASE_FIELDS), lineterminator="\n")
    w.writeheader()
    for r in clean(rows):
        w.writerow({k: json.dumps(v) if isinstance(v, list) else v for k, v in r.items()})
    return buf.getvalue()


class SchemaError(ValueError):
    pass


def validate_report(data: dict) -> dict:
    """Check a parsed report against the documented schema; return it unchanged."""
    for key, types in REPORT_FIELDS.items():
        if key not in data:
            raise SchemaError(f"missing field {key!r}")
        if not isinstance(data[key], types):
            raise SchemaError(f"field {key!r} has type {type(data[key]).__name__}")
    extra = set(data) - set(REPORT_FIELDS)
    if extra:
        raise SchemaError(f"unexpected fields {sorted(extra)}")
    for i, case in enumerate(data["cases"]):
        if set(case) != set(CASE_FIELDS):
            raise SchemaError(f"cases[{i}] has fields {sorted(case)}")
        for key, types in CASE_FIELDS.items():
            if not isinstance(case[key], types):
                raise SchemaError(f"cases[{i}].{key} has type {type(case[key]).__name__}")
        if case["rule"] not in RULES:
            raise SchemaError(f"cases[{i}].rule is {case['rule']!r}")
    if data["pass"] != all(c["pass"] for c in data["cases"]):
        raise SchemaError("overall pass disagrees with the cases")
    if "config" not in data["environment"]:
        raise SchemaError("environment lacks the config echo")
    return data
