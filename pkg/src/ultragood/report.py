"""Suite configuration and the JSON/CSV goodness report.

A report is a plain dict with a stable schema::

    {suite, tool_version, config, config_hash, seed, status, summary,
     constants, resolutions, cases[], violations[]}

Serialisation uses sorted keys so equal configurations give byte-identical
files.  Wall-clock time is only recorded when explicitly requested, since it
would break that guarantee.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import __version__

SCHEMA_VERSION = 1


@dataclass
class SuiteConfig:
    """Everything that determines a run."""

    suite: str
    p: list = field(default_factory=lambda: [3])
    d: list = field(default_factory=lambda: [1])
    l: list = field(default_factory=lambda: [2])
    n: int = 20
    seed: int = 0
    max_res: int | None = None
    eps_grid: Any = None
    measure: dict | None = None
    curve: Any = None
    file: str | None = None
    options: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, obj: dict) -> "SuiteConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(obj) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "suite" not in obj:
            raise ValueError("config needs a 'suite' name")
        data = dict(obj)
        for key in ("p", "d", "l"):
            if key in data and not isinstance(data[key], list):
                data[key] = [data[key]]
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, default=_default)
        return hashlib.sha256(blob.encode()).hexdigest()


def _default(obj):
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if isinstance(obj, tuple):
        return list(obj)
    try:
        return float(obj)
    except (TypeError, ValueError):
        return str(obj)


def new_report(config: SuiteConfig) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "suite": config.suite,
        "tool_version": __version__,
        "config": config.to_dict(),
        "config_hash": config.digest(),
        "seed": config.seed,
        "cases": [],
        "violations": [],
        "constants": {},
        "resolutions": {},
        "summary": {},
    }


def finish(report: dict) -> dict:
    report["cases"].sort(key=lambda c: str(c.get("id", "")))
    report["violations"].sort(key=lambda c: str(c.get("id", "")))
    report.setdefault("status", "violation" if report["violations"] else "pass")
    report["summary"].setdefault("cases", len(report["cases"]))
    report["summary"].setdefault("violations", len(report["violations"]))
    return report


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=_default) + "\n"


def to_csv(report: dict) -> str:
    """One row per case; nested values are JSON-encoded."""
    cases = report.get("cases", [])
    cols = sorted({k for c in cases for k in c})
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for c in cases:
        row = []
        for k in cols:
            v = c.get(k, "")
            if isinstance(v, (dict, list)):
                v = json.dumps(v, sort_keys=True, default=_default)
            row.append(v)
        writer.writerow(row)
    return buf.getvalue()


def write(report: dict, path: str | Path | None, fmt: str = "json") -> str:
    text = to_csv(report) if fmt == "csv" else dumps(report)
    if path:
        Path(path).write_text(text)
    return text


def load(path: str | Path) -> dict:
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot read report {path}: {exc}") from exc
    if not isinstance(obj, dict) or "suite" not in obj or "cases" not in obj:
        raise ValueError(f"{path} is not a goodness report")
    return obj


def summary_lines(report: dict) -> list[str]:
    lines = [
        f"suite: {report['suite']}  status: {report.get('status')}  seed: {report.get('seed')}",
        f"cases: {len(report.get('cases', []))}  violations: {len(report.get('violations', []))}",
        f"config hash: {report.get('config_hash', '')[:16]}  tool: {report.get('tool_version')}",
    ]
    for k, v in sorted(report.get("summary", {}).items()):
        if k not in ("cases", "violations"):
            lines.append(f"  {k}: {v}")
    for v in report.get("violations", [])[:5]:
        lines.append("  witness: " + json.dumps(v, sort_keys=True, default=_default)[:300])
    return lines
