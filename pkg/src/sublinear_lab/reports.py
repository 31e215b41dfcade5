"""Inequality reports and their JSON-lines serialization."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np

from .errors import FormatError

FORMAT_VERSION = 1
DEFAULT_TOL = 1e-9

REPORT_FIELDS = (
    "name",
    "lhs",
    "rhs",
    "constant",
    "constant_provenance",
    "slack",
    "pass",
    "fingerprint",
    "seed",
)


def within(lhs: float, rhs: float, tol: float = DEFAULT_TOL) -> bool:
    """Scale-aware ``lhs <= rhs`` with slack ``tol * max(1, |rhs|)``."""
    return bool(lhs <= rhs + tol * max(1.0, abs(rhs)))


def _canonical(obj):
    if isinstance(obj, np.ndarray):
        return [_canonical(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): _canonical(v) for k, v in sorted(obj.items())}
    if isinstance(obj, (np.floating, float)):
        return repr(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if hasattr(obj, "fingerprint_payload"):
        return _canonical(obj.fingerprint_payload())
    return obj if isinstance(obj, (int, str, bool, type(None))) else repr(obj)


def fingerprint(*parts) -> str:
    """Stable 16-hex-digit digest of the inputs of a check."""
    blob = json.dumps(_canonical(list(parts)), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class InequalityReport:
    name: str
    lhs: float
    rhs: float
    constant: float = 1.0
    constant_provenance: str = ""
    fingerprint: str = ""
    seed: int | None = None
    tol: float = DEFAULT_TOL
    details: dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        return within(self.lhs, self.rhs, self.tol)

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "name": self.name,
            "lhs": float(self.lhs),
            "rhs": float(self.rhs),
            "constant": float(self.constant),
            "constant_provenance": self.constant_provenance,
            "slack": float(self.slack),
            "pass": self.passed,
            "fingerprint": self.fingerprint,
            "seed": self.seed,
        }

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: lhs={self.lhs:.12g} rhs={self.rhs:.12g} slack={self.slack:.3g}"


def equality_report(name: str, a: float, b: float, tol: float = DEFAULT_TOL, **kw) -> InequalityReport:
    """Two-sided check ``|a - b| <= tol`` encoded as ``lhs=|a-b|``, ``rhs=0``."""
    details = dict(kw.pop("details", {}))
    details.update(left=a, right=b)
    return InequalityReport(name, abs(a - b), 0.0, tol=tol, details=details, **kw)


@dataclass
class CheckReport:
    """Outcome of a randomized or enumerative property check."""

    name: str
    trials: int = 0
    failures: list = field(default_factory=list)
    worst_margin: float = math.inf
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, what) -> None:
        self.failures.append(what)

    def margin(self, value: float) -> None:
        self.worst_margin = min(self.worst_margin, float(value))

    def line(self) -> str:
        status = "PASS" if self.passed else f"FAIL ({len(self.failures)} violations)"
        return f"{status} {self.name}: trials={self.trials} worst_margin={self.worst_margin:.3g}"


def to_jsonl(reports: Iterable[InequalityReport]) -> str:
    """One JSON object per line, sorted by fingerprint then name."""
    rows = sorted(reports, key=lambda r: (r.fingerprint, r.name, r.seed if r.seed is not None else -1))
    return "".join(json.dumps(r.to_dict()) + "\n" for r in rows)


def read_jsonl(text: str) -> list[dict]:
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
        missing = [k for k in REPORT_FIELDS if k not in row]
        if missing:
            raise FormatError(f"line {lineno}: missing fields {missing}")
        if row.get("format_version", FORMAT_VERSION) != FORMAT_VERSION:
            raise FormatError(f"line {lineno}: unsupported format_version {row['format_version']}")
        rows.append(row)
    return rows
