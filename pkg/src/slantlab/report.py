"""Check results and report serialization.

Per-check results carry a status, residual statistics, and the worst-case
witness (point and vectors) so failures can be reproduced by hand.  Suite
reports render either as human-readable text or as JSON.  JSON output is
byte-deterministic for a fixed manifest and seed: keys are sorted, floats
rely on Python's repr round-trip, and wall times are deliberately left out
of the JSON form (they appear only in the text rendering).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

SCHEMA_VERSION = 1

PASS = "pass"
FAIL = "fail"
HYPOTHESIS_NOT_MET = "hypothesis-not-met"
SKIPPED = "skipped"


def _plain(value):
    """Convert numpy scalars/arrays into JSON-safe Python values."""
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.ndarray):
        return [_plain(x) for x in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_plain(x) for x in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    return value


@dataclass
class Witness:
    """Worst-case sample for a check: where and with which vectors."""

    point: list
    vectors: list = field(default_factory=list)
    residual: float = 0.0
    label: str = ""

    def to_dict(self) -> dict:
        out = {"point": _plain(self.point), "residual": float(self.residual)}
        if self.vectors:
            out["vectors"] = _plain(self.vectors)
        if self.label:
            out["label"] = self.label
        return out


class ResidualTracker:
    """Accumulates residuals and remembers the worst witness."""

    def __init__(self):
        self.count = 0
        self.total = 0.0
        self.max = 0.0
        self.witness: Witness | None = None

    def add(self, residual: float, point=None, vectors=(), label: str = ""):
        residual = float(abs(residual))
        self.count += 1
        self.total += residual
        if self.witness is None or residual > self.max:
            self.max = residual
            self.witness = Witness(
                point=_plain(list(point)) if point is not None else [],
                vectors=[_plain(list(v)) for v in vectors],
                residual=residual,
                label=label,
            )

    @property
    def mean(self) -> float:
        return self.total / self.count if self.count else 0.0


@dataclass
class CheckResult:
    name: str
    status: str
    residual_max: float | None = None
    residual_mean: float | None = None
    count: int = 0
    witness: Witness | None = None
    detail: str = ""
    extras: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @classmethod
    def from_tracker(cls, name: str, tracker: ResidualTracker, passed: bool,
                     detail: str = "", extras: dict | None = None) -> "CheckResult":
        return cls(
            name=name,
            status=PASS if passed else FAIL,
            residual_max=tracker.max,
            residual_mean=tracker.mean,
            count=tracker.count,
            witness=tracker.witness,
            detail=detail,
            extras=extras or {},
        )

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "status": self.status,
            "count": int(self.count),
        }
        if self.residual_max is not None:
            out["residual_max"] = float(self.residual_max)
            out["residual_mean"] = float(self.residual_mean or 0.0)
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        if self.detail:
            out["detail"] = self.detail
        if self.extras:
            out["extras"] = _plain(self.extras)
        return out

    def text_line(self) -> str:
        tag = {PASS: "PASS", FAIL: "FAIL",
               HYPOTHESIS_NOT_MET: "HYP?", SKIPPED: "SKIP"}[self.status]
        line = f"[{tag:4s}] {self.name:28s}"
        if self.residual_max is not None:
            line += f" max={self.residual_max:10.3e} mean={self.residual_mean:10.3e}"
            line += f" n={self.count}"
        if self.detail:
            line += f"  {self.detail}"
        line += f"  ({self.wall_time:.2f}s)"
        return line


@dataclass
class SuiteReport:
    instance: str
    checks: list
    metadata: dict = field(default_factory=dict)

    def by_name(self, name: str) -> CheckResult:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def counts(self) -> dict:
        out = {PASS: 0, FAIL: 0, HYPOTHESIS_NOT_MET: 0, SKIPPED: 0}
        for check in self.checks:
            out[check.status] += 1
        return out

    @property
    def exit_code(self) -> int:
        return 1 if self.counts()[FAIL] else 0

    def to_dict(self) -> dict:
        counts = self.counts()
        return {
            "schema_version": SCHEMA_VERSION,
            "instance": self.instance,
            "metadata": _plain(self.metadata),
            "summary": {
                "pass": counts[PASS],
                "fail": counts[FAIL],
                "hypothesis_not_met": counts[HYPOTHESIS_NOT_MET],
                "skipped": counts[SKIPPED],
                "exit_code": self.exit_code,
            },
            "checks": [check.to_dict() for check in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        counts = self.counts()
        lines = [f"instance: {self.instance}"]
        for key in ("seed", "points", "directions"):
            if key in self.metadata:
                lines.append(f"{key}: {self.metadata[key]}")
        lines.append("-" * 72)
        lines.extend(check.text_line() for check in self.checks)
        lines.append("-" * 72)
        lines.append(
            f"{counts[PASS]} pass, {counts[FAIL]} fail, "
            f"{counts[HYPOTHESIS_NOT_MET]} hypothesis-not-met, "
            f"{counts[SKIPPED]} skipped"
        )
        return "\n".join(lines) + "\n"
