"""Check reports: per-identity verdicts with residual witnesses."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .scalars import Scalar, scalar_to_text


@dataclass
class CheckReport:
    """Outcome of one identity check.

    ``residuals`` holds only the nonzero witnesses, as (location, value)
    pairs where the location is an index tuple or a labelled tuple; a check
    passes iff every residual it produced was the zero scalar.
    """

    identity: str
    passed: bool
    residuals: list[tuple[tuple, Scalar]] = field(default_factory=list)
    assumptions: list[str] = field(default_factory=list)

    def to_json_obj(self, names: Sequence[str]) -> dict:
        return {
            "identity": self.identity,
            "pass": self.passed,
            "residuals": [
                {"at": list(at), "value": scalar_to_text(value, names)}
                for at, value in self.residuals
            ],
            "assumptions": list(self.assumptions),
        }


def report_from_residuals(
    identity: str,
    residuals: dict[tuple, Scalar],
    assumptions: list[str] | None = None,
) -> CheckReport:
    """Build a report keeping only nonzero residual components."""
    witnesses = [(at, value) for at, value in residuals.items() if not value.is_zero()]
    return CheckReport(
        identity=identity,
        passed=not witnesses,
        residuals=witnesses,
        assumptions=list(assumptions or []),
    )
