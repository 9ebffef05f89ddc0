"""Check results and verification reports."""

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Mapping, Optional

from ..algebra.expr import Expr
from ..algebra.parser import format_coordinate, format_expr
from ..algebra.bundle import CoordId

DEFAULT_RESIDUAL_TERMS = 50
ORACLE_DISAGREES = "numeric oracle disagrees with exact zero"

_COLORS = {
    "pass": "\033[32m",
    "fail": "\033[31m",
    "skipped": "\033[33m",
}
_RESET = "\033[0m"


class CheckStatus(Enum):
    """Outcome of one named check."""

    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped"


@dataclass
class CheckResult:
    """One named check.

    ``residual`` holds the printed nonzero remainder on failure; ``detail``
    carries check-specific facts (row counts, oracle points, nonvanishing
    mode) that go into the JSON report verbatim.
    """

    check: str
    status: CheckStatus
    residual: Optional[str] = None
    millis: float = 0.0
    detail: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def passed(cls, check: str, **detail: Any) -> "CheckResult":
        return cls(check, CheckStatus.PASS, detail=detail)

    @classmethod
    def failed(cls, check: str, residual: str, **detail: Any) -> "CheckResult":
        return cls(check, CheckStatus.FAIL, residual=residual, detail=detail)

    @classmethod
    def skipped(cls, check: str, reason: str) -> "CheckResult":
        return cls(check, CheckStatus.SKIPPED, detail={"reason": reason})

    @property
    def ok(self) -> bool:
        return self.status is not CheckStatus.FAIL

    def to_dict(self, include_timing: bool = True) -> dict[str, Any]:
        data: dict[str, Any] = {"check": self.check, "status": self.status.value}
        if self.residual is not None:
            data["residual"] = self.residual
        if include_timing:
            data["millis"] = round(self.millis, 3)
        if self.detail:
            data["detail"] = self.detail
        return data


def residual_text(
    rows: Mapping[CoordId, Expr] | Expr,
    max_terms: Optional[int] = DEFAULT_RESIDUAL_TERMS,
) -> str:
    """Printed residual, one ``component: expr`` entry per nonzero row."""
    if isinstance(rows, Expr):
        return format_expr(rows, max_terms)
    return "; ".join(
        f"{format_coordinate(coord)}: {format_expr(value, max_terms)}"
        for coord, value in rows.items()
        if not value.is_zero()
    )


@dataclass
class VerificationReport:
    """Named checks for one model, ordered by check name."""

    model: str
    checks: list[CheckResult] = field(default_factory=list)

    def add(self, result: CheckResult) -> None:
        self.checks.append(result)

    def extend(self, results: Iterable[CheckResult]) -> None:
        self.checks.extend(results)

    def sorted_checks(self) -> list[CheckResult]:
        return sorted(self.checks, key=lambda c: c.check)

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.sorted_checks() if c.status is CheckStatus.FAIL]

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def exit_code(self) -> int:
        """0 when every non-skipped check passed, 1 otherwise."""
        return 0 if self.ok else 1

    def counts(self) -> dict[str, int]:
        result = {status.value: 0 for status in CheckStatus}
        for check in self.checks:
            result[check.status.value] += 1
        return result

    def to_records(self, include_timing: bool = True) -> list[dict[str, Any]]:
        return [
            {"model": self.model, **check.to_dict(include_timing)}
            for check in self.sorted_checks()
        ]

    def to_json(self, include_timing: bool = True) -> str:
        return render_json([self], include_timing)

    def render_text(self, color: bool = False) -> str:
        lines = [f"model {self.model}"]
        for check in self.sorted_checks():
            tag = check.status.value.upper()
            if color:
                tag = f"{_COLORS[check.status.value]}{tag}{_RESET}"
            lines.append(f"  [{tag}] {check.check} ({check.millis:.1f} ms)")
            if check.residual:
                lines.append(f"      residual: {check.residual}")
            if check.status is CheckStatus.SKIPPED and "reason" in check.detail:
                lines.append(f"      reason: {check.detail['reason']}")
        counts = self.counts()
        lines.append(
            f"  {counts['pass']} passed, {counts['fail']} failed, {counts['skipped']} skipped"
        )
        return "\n".join(lines)


def render_json(reports: Iterable[VerificationReport], include_timing: bool = True) -> str:
    """JSON array of check records across reports, in model then check order."""
    records: list[dict[str, Any]] = []
    for report in reports:
        records.extend(report.to_records(include_timing))
    return json.dumps(records, indent=2, sort_keys=True)
