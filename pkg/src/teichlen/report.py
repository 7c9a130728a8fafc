"""Evaluated inequality reports shared by every checker."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"

_RELATIONS = {
    "<": lambda l, r, tol: l < r,
    "<=": lambda l, r, tol: l <= r + tol,
    ">": lambda l, r, tol: l > r,
    ">=": lambda l, r, tol: l >= r - tol,
}


@dataclass(frozen=True)
class BoundReport:
    """One inequality ``lhs <relation> rhs`` evaluated at concrete inputs.

    ``status`` is ``pass``, ``fail`` or ``inconclusive``; only ``fail``
    counts against a run.  ``citation`` names the result being checked.
    """

    name: str
    inputs: dict[str, Any]
    lhs: float
    rhs: float
    relation: str
    status: str
    citation: str
    notes: tuple[str, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return self.status == PASS

    @property
    def margin(self) -> float:
        """Signed slack; positive when the inequality holds."""
        if self.relation in ("<", "<="):
            return self.rhs - self.lhs
        if self.relation in (">", ">="):
            return self.lhs - self.rhs
        return math.nan

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "inputs": dict(self.inputs),
            "lhs": _jsonable(self.lhs),
            "rhs": _jsonable(self.rhs),
            "relation": self.relation,
            "pass": self.passed,
            "status": self.status,
            "margin": _jsonable(self.margin),
            "citation": self.citation,
            "notes": list(self.notes),
        }


def compare(
    name: str,
    lhs: float,
    relation: str,
    rhs: float,
    citation: str,
    inputs: dict[str, Any] | None = None,
    tol: float = 0.0,
    notes: tuple[str, ...] = (),
) -> BoundReport:
    """Build a report whose status is decided by ``relation``."""
    ok = _RELATIONS[relation](lhs, rhs, tol)
    return BoundReport(
        name=name,
        inputs=dict(inputs or {}),
        lhs=lhs,
        rhs=rhs,
        relation=relation,
        status=PASS if ok else FAIL,
        citation=citation,
        notes=tuple(notes),
    )


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return x
