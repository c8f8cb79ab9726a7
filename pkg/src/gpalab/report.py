"""Structured verification reports.

Every verification operation in this package returns a Report: an ordered
list of named check records, each carrying a self-contained statement of the
identity checked, the numeric residual, the tolerance, and the pass flag.
Reports merge deterministically and serialize to JSON with fixed-width
decimal strings so that identical runs produce byte-identical output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import gmpy2

from . import scalars

RESIDUAL_DIGITS = 20


@dataclass(frozen=True)
class CheckRecord:
    """One verified identity: what was checked and how close it came."""

    name: str
    statement: str
    residual: gmpy2.mpfr
    tol: gmpy2.mpfr
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "statement": self.statement,
            "residual": scalars.decimal_str(self.residual, RESIDUAL_DIGITS),
            "tol": scalars.decimal_str(self.tol, RESIDUAL_DIGITS),
            "pass": self.passed,
        }


@dataclass
class Report:
    """A named bundle of check records plus free-form correction notes."""

    name: str
    records: list[CheckRecord] = field(default_factory=list)
    corrections: list[dict] = field(default_factory=list)

    def check(self, name: str, statement: str, residual, tol) -> CheckRecord:
        res = abs(gmpy2.mpc(residual))
        tol = gmpy2.mpfr(tol)
        rec = CheckRecord(
            name=name,
            statement=statement,
            residual=gmpy2.mpfr(res),
            tol=tol,
            passed=bool(res <= tol),
        )
        self.records.append(rec)
        return rec

    def expect_true(self, name: str, statement: str, condition: bool) -> CheckRecord:
        """A boolean check recorded with a 0/1 residual."""
        rec = CheckRecord(
            name=name,
            statement=statement,
            residual=gmpy2.mpfr(0 if condition else 1),
            tol=gmpy2.mpfr("0.5"),
            passed=bool(condition),
        )
        self.records.append(rec)
        return rec

    def note_correction(self, name: str, statement: str, value: str) -> None:
        self.corrections.append(
            {"name": name, "statement": statement, "value": value}
        )

    @property
    def passed(self) -> bool:
        return all(rec.passed for rec in self.records)

    def merge(self, other: "Report") -> "Report":
        self.records.extend(other.records)
        self.corrections.extend(other.corrections)
        return self

    def failures(self) -> list[CheckRecord]:
        return [rec for rec in self.records if not rec.passed]

    def to_json_dict(self) -> dict:
        out = {
            "name": self.name,
            "pass": self.passed,
            "checks": [rec.to_json_dict() for rec in self.records],
        }
        if self.corrections:
            out["corrections"] = list(self.corrections)
        return out

    def summary_lines(self) -> list[str]:
        lines = []
        for rec in self.records:
            flag = "pass" if rec.passed else "FAIL"
            lines.append(f"[{flag}] {rec.name}: residual {scalars.decimal_str(rec.residual, 3)}")
        return lines
