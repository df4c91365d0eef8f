"""Structured check reports and the shared tolerance policy."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Tolerances:
    """A residual r passes iff ||r||_inf <= abs + rel * scale."""

    abs: float = 1e-8
    rel: float = 1e-8

    def ok(self, residual: float, scale: float = 1.0) -> bool:
        return residual <= self.abs + self.rel * abs(scale)


@dataclass
class CheckRecord:
    check_id: str
    anchor: str
    residual: float
    worst_point: object = None
    passed: bool = True
    note: str = ""

    def as_dict(self):
        pt = None
        if self.worst_point is not None:
            pt = [float(v) for v in getattr(self.worst_point, "coords", self.worst_point)]
        return {
            "check_id": self.check_id,
            "anchor": self.anchor,
            "residual": float(self.residual),
            "point": pt,
            "pass": bool(self.passed),
            "note": self.note,
        }


class Report:
    """Per-condition records plus an overall verdict.

    Checkers collect worst residuals instead of throwing, so a broken input
    yields a failing record that names the violated condition.
    """

    def __init__(self, title: str = ""):
        self.title = title
        self.records: list[CheckRecord] = []
        self.stats: dict = {}
        self.notes: list[str] = []

    def add(self, rec: CheckRecord) -> CheckRecord:
        self.records.append(rec)
        return rec

    def extend(self, other: "Report", prefix: str = ""):
        for r in other.records:
            if prefix:
                r = CheckRecord(f"{prefix}{r.check_id}", r.anchor, r.residual,
                                r.worst_point, r.passed, r.note)
            self.records.append(r)
        self.notes.extend(other.notes)
        return self

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def max_residual(self) -> float:
        return max((r.residual for r in self.records), default=0.0)

    def failing(self):
        return [r for r in self.records if not r.passed]

    def record(self, check_id):
        for r in self.records:
            if r.check_id == check_id:
                return r
        raise KeyError(check_id)

    # --- emission -------------------------------------------------------------
    def to_text(self) -> str:
        lines = []
        head = f"== {self.title or 'report'} : {'PASS' if self.passed else 'FAIL'} =="
        lines.append(head)
        if self.records:
            wid = max(len(r.check_id) for r in self.records)
            wa = max(len(r.anchor) for r in self.records)
            for r in self.records:
                pt = ""
                if r.worst_point is not None:
                    coords = getattr(r.worst_point, "coords", r.worst_point)
                    pt = "(" + ", ".join(f"{float(v):.4g}" for v in coords) + ")"
                status = "pass" if r.passed else "FAIL"
                note = f"  {r.note}" if r.note else ""
                lines.append(f"  {r.check_id:<{wid}}  {r.anchor:<{wa}}  "
                             f"{r.residual:10.3e}  {status}  {pt}{note}")
        for n in self.notes:
            lines.append(f"  note: {n}")
        if self.stats:
            stat = ", ".join(f"{k}={v}" for k, v in sorted(self.stats.items()))
            lines.append(f"  stats: {stat}")
        return "\n".join(lines)

    def as_dict(self) -> dict:
        return {
            "title": self.title,
            "verdict": "pass" if self.passed else "fail",
            "records": [r.as_dict() for r in self.records],
            "notes": list(self.notes),
            "stats": {k: self.stats[k] for k in sorted(self.stats)},
        }

    def to_machine(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)


def emit_report(report: Report, fmt: str = "text") -> bytes:
    if fmt == "machine":
        return (report.to_machine() + "\n").encode("utf-8")
    if fmt == "text":
        return (report.to_text() + "\n").encode("utf-8")
    raise ValueError(f"unknown report format {fmt!r}")


class ResidualTracker:
    """Tracks the worst residual and where it happened."""

    __slots__ = ("value", "point", "scale")

    def __init__(self):
        self.value = 0.0
        self.point = None
        self.scale = 1.0

    def update(self, residual, point, scale=None):
        residual = float(residual)
        if residual > self.value:
            self.value = residual
            self.point = point
        if scale is not None:
            self.scale = max(self.scale, float(scale))

    def rec(self, check_id, anchor, tol: Tolerances, note="") -> CheckRecord:
        return CheckRecord(check_id, anchor, self.value, self.point,
                           tol.ok(self.value, self.scale), note)
