"""Machine-readable verification reports.

A report is a list of check records, each carrying the achieved residual
next to its tolerance (never a bare pass/fail).  JSON output is
byte-stable for a fixed config and seed: keys are sorted, floats are
printed with 17 significant digits, and everything environment-dependent
lives under the single "environment" key.
"""

from __future__ import annotations

import csv
import io
import json
import platform
import sys
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np


@dataclass
class CheckRecord:
    check_id: str
    description: str
    residual: float
    tolerance: float
    passed: bool
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_residual(cls, check_id: str, description: str, residual,
                      tolerance, extra: Optional[dict] = None) -> "CheckRecord":
        residual = float(residual)
        tolerance = float(tolerance)
        return cls(check_id, description, residual, tolerance,
                   residual <= tolerance, extra or {})

    @classmethod
    def from_flag(cls, check_id: str, description: str, ok: bool,
                  extra: Optional[dict] = None) -> "CheckRecord":
        # boolean checks are recorded with residual 0/1 against tolerance 0
        return cls(check_id, description, 0.0 if ok else 1.0, 0.0, bool(ok),
                   extra or {})


@dataclass
class Report:
    suite: str
    seed: int
    config: dict
    checks: List[CheckRecord] = field(default_factory=list)
    elapsed_s: float = 0.0

    def add(self, record: CheckRecord):
        self.checks.append(record)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def max_residual(self) -> float:
        return max((c.residual for c in self.checks), default=0.0)

    def summary(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "checks": len(self.checks),
            "failures": sum(1 for c in self.checks if not c.passed),
            "max_residual": self.max_residual,
            "passed": self.passed,
        }


def _format_number(x):
    if isinstance(x, bool):
        return x
    if isinstance(x, (np.floating, float)):
        return float(f"{float(x):.17g}")
    if isinstance(x, (np.integer, int)):
        return int(x)
    return x


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    return _format_number(obj)


def environment_fingerprint(elapsed_s: float) -> dict:
    return {
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "platform": platform.platform(),
        "elapsed_s": elapsed_s,
    }


def report_to_dict(report: Report, with_environment: bool = True) -> dict:
    body = {
        "suite": report.suite,
        "seed": report.seed,
        "config": _clean(report.config),
        "checks": [
            {
                "id": c.check_id,
                "description": c.description,
                "residual": _format_number(c.residual),
                "tolerance": _format_number(c.tolerance),
                "passed": c.passed,
                "extra": _clean(c.extra),
            }
            for c in report.checks
        ],
        "summary": _clean(report.summary()),
    }
    if with_environment:
        body["environment"] = _clean(environment_fingerprint(report.elapsed_s))
    return body


def emit_json(report: Report, with_environment: bool = True) -> str:
    return json.dumps(report_to_dict(report, with_environment), sort_keys=True,
                      indent=2) + "\n"


def emit_csv(report: Report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["check_id", "description", "residual", "tolerance", "passed"])
    for c in report.checks:
        writer.writerow([c.check_id, c.description, f"{c.residual:.17g}",
                         f"{c.tolerance:.17g}", c.passed])
    return buf.getvalue()


def emit_markdown(report: Report) -> str:
    lines = [
        f"# Suite `{report.suite}`",
        "",
        f"- seed: {report.seed}",
        f"- checks: {len(report.checks)}, failures: "
        f"{sum(1 for c in report.checks if not c.passed)}",
        f"- max residual: {report.max_residual:.6g}",
        "",
        "| check | residual | tolerance | verdict |",
        "|---|---|---|---|",
    ]
    for c in report.checks:
        verdict = "pass" if c.passed else "FAIL"
        lines.append(f"| {c.check_id} | {c.residual:.6g} | {c.tolerance:.6g} "
                     f"| {verdict} |")
    return "\n".join(lines) + "\n"


def write_report(report: Report, out_dir, fmt: str = "json") -> str:
    """Write the report into out_dir; returns the file path."""
    import pathlib
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        path = out / f"{report.suite}.json"
        path.write_text(emit_json(report))
    elif fmt == "csv":
        path = out / f"{report.suite}.csv"
        path.write_text(emit_csv(report))
    elif fmt == "markdown":
        path = out / f"{report.suite}.md"
        path.write_text(emit_markdown(report))
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return str(path)
