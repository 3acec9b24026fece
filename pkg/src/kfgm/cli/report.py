"""Invariant reports and CSV dumps."""
from __future__ import annotations

import csv
import datetime as _dt
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class ReportRow:
    name: str
    anchor: str
    residual: float
    tolerance: float
    passed: bool
    comparison: str = "<="

    @classmethod
    def upper(cls, name: str, anchor: str, residual: float, tolerance: float) -> "ReportRow":
        residual = float(residual)
        return cls(name, anchor, residual, float(tolerance), bool(residual <= tolerance))

    @classmethod
    def lower(cls, name: str, anchor: str, value: float, bound: float) -> "ReportRow":
        value = float(value)
        return cls(name, anchor, value, float(bound), bool(value >= bound), ">=")

    @classmethod
    def flag(cls, name: str, anchor: str, ok: bool) -> "ReportRow":
        return cls(name, anchor, 0.0 if ok else 1.0, 0.0, bool(ok), "==")

    def to_dict(self) -> dict:
        r = self.residual
        return {
            "name": self.name,
            "anchor": self.anchor,
            "residual": r if math.isfinite(r) else str(r),
            "tolerance": self.tolerance,
            "comparison": self.comparison,
            "pass": self.passed,
        }


@dataclass
class InvariantReport:
    command: str
    rows: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def add(self, row: ReportRow) -> ReportRow:
        self.rows.append(row)
        return row

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def to_dict(self, timestamp: bool = True) -> dict:
        d = {
            "command": self.command,
            "pass": self.passed,
            "rows": [r.to_dict() for r in self.rows],
            "provenance": self.provenance,
            "details": self.details,
        }
        if timestamp:
            d["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
        return d

    def dumps(self, timestamp: bool = True) -> str:
        return json.dumps(self.to_dict(timestamp), indent=2, sort_keys=True, default=_jsonable) + "\n"

    def write(self, out_dir) -> Path:
        path = Path(out_dir) / "report.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.dumps())
        return path

    def summary_lines(self) -> list[str]:
        lines = []
        for r in self.rows:
            tag = "PASS" if r.passed else "FAIL"
            lines.append(f"[{tag}] {r.name}: {r.residual:.3e} {r.comparison} {r.tolerance:.3e}  ({r.anchor})")
        return lines


def _jsonable(obj):
    if hasattr(obj, "item"):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (set, tuple)):
        return sorted(obj) if isinstance(obj, set) else list(obj)
    return str(obj)


def write_csv(path, rows: list[dict], columns: list[str] | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = columns or (list(rows[0]) if rows else [])
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=columns)
        w.writeheader()
        for r in rows:
            w.writerow({c: _fmt(r.get(c)) for c in columns})
    return path


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return int(v)
    return v
