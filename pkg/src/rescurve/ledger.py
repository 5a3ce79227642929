"""Depletion and deployment accounting over a cost-supply curve.

A ledger tracks how much of one resource has been extracted (stocks) or
deployed (renewable flows) and answers marginal-cost queries against the
tabulated curve.  Marginal cost rises monotonically with use and diverges
as the technical potential is approached.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .curveset import TabulatedCurve, invert
from .errors import DepletionError, DomainError

__all__ = ["LedgerState", "marginal_cost", "consume", "release", "remaining"]


@dataclass(frozen=True)
class LedgerState:
    """Immutable usage state; operations return updated copies."""

    resource: str
    curve: TabulatedCurve
    Q: float = 0.0
    renewable: bool = False  # flows may be released (capacity retirement)

    def __post_init__(self):
        if self.Q < 0.0:
            raise DomainError(f"cumulative use must be non-negative, got {self.Q}")
        if self.Q >= self.potential:
            raise DepletionError(
                f"{self.resource}: use {self.Q} is at or beyond the potential "
                f"{self.potential}",
                feasible=self.potential,
            )

    @property
    def potential(self) -> float:
        return float(self.curve.quantities[-1])

    def to_json(self) -> str:
        return json.dumps(
            {
                "resource": self.resource,
                "Q": self.Q,
                "renewable": self.renewable,
                "quantity_unit": self.curve.quantity_unit,
                "cost_unit": self.curve.cost_unit,
            }
        )


def marginal_cost(s: LedgerState) -> float:
    """Cost of the next unit given current cumulative use."""
    return invert(s.curve, s.Q)


def _segment_integral(curve: TabulatedCurve, a: float, b: float) -> float:
    """Integral of C(N) dN over [a, b] on the piecewise-linear curve."""
    quants = curve.quantities
    costs = curve.costs
    nodes = quants[(quants > a) & (quants < b)]
    grid = np.concatenate(([a], nodes, [b]))
    c = np.interp(grid, quants, costs)
    trapezoid = getattr(np, "trapezoid", None) or np.trapz
    return float(trapezoid(c, grid))


def consume(s: LedgerState, dQ: float) -> tuple[LedgerState, float]:
    """Advance use by ``dQ`` and return the average cost of the increment.

    The average is the exact integral of the piecewise-linear marginal cost
    over the increment, so it always lies between the endpoint marginal
    costs.  ``dQ = 0`` returns the current marginal cost.
    """
    if dQ < 0.0:
        raise DomainError(f"consumption increment must be non-negative, got {dQ}")
    if s.Q + dQ >= s.potential:
        raise DepletionError(
            f"{s.resource}: consuming {dQ} would exhaust the potential; "
            f"at most {s.potential - s.Q} remains",
            feasible=s.potential - s.Q,
        )
    if dQ == 0.0:
        return s, marginal_cost(s)
    avg = _segment_integral(s.curve, s.Q, s.Q + dQ) / dQ
    return replace(s, Q=s.Q + dQ), avg


def release(s: LedgerState, dQ: float) -> LedgerState:
    """Retire deployed flow; only renewable ledgers may decrease."""
    if not s.renewable:
        raise DomainError(f"{s.resource}: stock extraction cannot be undone")
    if dQ < 0.0 or dQ > s.Q:
        raise DomainError(f"release must lie in [0, {s.Q}], got {dQ}")
    return replace(s, Q=s.Q - dQ)


def remaining(s: LedgerState) -> float:
    """Quantity still available before the potential is reached."""
    return s.potential - s.Q
