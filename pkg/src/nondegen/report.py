"""Check records and the versioned report format (JSON / flat CSV)."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

SCHEMA = "1"

__all__ = ["CheckRecord", "Report", "SCHEMA", "to_jsonable"]


def to_jsonable(obj):
    """Recursively convert numpy scalars/arrays and non-finite floats for JSON."""
    if hasattr(obj, "tolist"):
        obj = obj.tolist()
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


@dataclass
class CheckRecord:
    name: str
    params: dict
    computed: object
    reference: object
    tol: float
    passed: bool
    seconds: float = 0.0
    detail: str = ""

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "params": to_jsonable(self.params),
            "computed": to_jsonable(self.computed),
            "reference": to_jsonable(self.reference),
            "tol": self.tol,
            "pass": bool(self.passed),
            "seconds": self.seconds,
            "detail": self.detail,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CheckRecord":
        return cls(d["name"], d["params"], d["computed"], d["reference"], d["tol"],
                   d["pass"], d["seconds"], d.get("detail", ""))

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  {self.detail}" if self.detail else ""
        return f"[{status}] {self.name}{extra}"


@dataclass
class Report:
    config: dict
    checks: list = field(default_factory=list)
    normalization: float = None
    timestamp: str = None

    @property
    def verdict(self) -> bool:
        return all(c.passed for c in self.checks)

    def failing(self) -> list:
        return [c.name for c in self.checks if not c.passed]

    def as_dict(self) -> dict:
        d = {
            "schema": SCHEMA,
            "config": to_jsonable(self.config),
            "checks": [c.as_dict() for c in self.checks],
            "normalization": self.normalization,
            "verdict": "pass" if self.verdict else "fail",
        }
        if self.timestamp is not None:
            d["timestamp"] = self.timestamp
        return d

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Report":
        d = json.loads(text)
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {d.get('schema')!r}")
        return cls(d["config"], [CheckRecord.from_dict(c) for c in d["checks"]],
                   d["normalization"], d.get("timestamp"))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "params", "computed", "reference", "tol", "pass", "seconds"])
        for c in self.checks:
            d = c.as_dict()
            w.writerow([
                d["name"],
                json.dumps(d["params"], sort_keys=True),
                json.dumps(d["computed"]),
                json.dumps(d["reference"]),
                repr(d["tol"]),
                "pass" if d["pass"] else "fail",
                repr(d["seconds"]),
            ])
        return buf.getvalue()
