"""Structured verification reports with canonical, byte-stable JSON output."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .util import canonical_json

SCHEMA_VERSION = 1


@dataclass
class CheckResult:
    """One named check: measured value against a target within a tolerance.

    target/tol may be None for report-only quantities that carry no
    pass/fail semantics of their own.
    """

    id: str
    passed: bool
    value: float | None = None
    target: float | None = None
    tol: float | None = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"id": self.id, "passed": bool(self.passed)}
        if self.value is not None:
            out["value"] = self.value
        if self.target is not None:
            out["target"] = self.target
        if self.tol is not None:
            out["tol"] = self.tol
        if self.details:
            out["details"] = self.details
        return out


@dataclass
class VerificationReport:
    """A suite of checks plus the fitted constants they produced."""

    name: str
    config: dict = field(default_factory=dict)
    checks: list[CheckResult] = field(default_factory=list)
    constants: dict = field(default_factory=dict)

    def add(self, id: str, passed: bool, value=None, target=None, tol=None,
            **details) -> CheckResult:
        chk = CheckResult(id=id, passed=bool(passed), value=value,
                          target=target, tol=tol, details=details)
        self.checks.append(chk)
        return chk

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failing(self) -> list[str]:
        return [c.id for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "name": self.name,
            "config": self.config,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "constants": self.constants,
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    def write(self, outdir: str) -> str:
        """Write reports/<name>.json under outdir atomically; returns the path."""
        rdir = os.path.join(outdir, "reports")
        os.makedirs(rdir, exist_ok=True)
        path = os.path.join(rdir, f"{self.name}.json")
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
            fh.write("\n")
        os.replace(tmp, path)
        return path
