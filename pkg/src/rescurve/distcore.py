"""Closed-form resource distributions in cost space.

Two families cover every resource curve in the database:

* hierarchical -- strongly ordered occurrences (windy sites, river basins,
  wells, mines).  The quantity available decays exponentially with site
  quality, which in cost space gives the cumulative
  ``N(C) = A * exp(-B / (C - C0))``.

* nearly identical -- interchangeable occurrences (sunny land, cropland)
  whose costs cluster just above a common floor.  The cumulative is a
  half-Gaussian, ``N(C) = A * erf((C - C0) / (sqrt(2) * B))``.

``A`` is the technical potential (the saturation value of the cumulative),
``B`` the cost scale and ``C0`` the cost offset below which nothing is
available.  The half-Gaussian density carries the normalisation
``2 / sqrt(2*pi)`` so that its integral over ``C > C0`` equals ``A`` and the
erf cumulative above holds exactly.

The cost-supply curve is the inverse of the cumulative: the marginal cost of
one more unit after ``N`` units have been used.  It diverges as ``N -> A``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import DepletionError, DomainError

__all__ = [
    "DistributionKind",
    "Distribution",
    "Productivity",
    "density",
    "cumulative",
    "cost_at",
    "erf_inv",
]

_SQRT2 = math.sqrt(2.0)
_HALF_GAUSS_NORM = math.sqrt(2.0 / math.pi)


class DistributionKind(Enum):
    HIERARCHICAL = "hierarchical"
    NEARLY_IDENTICAL = "nearly_identical"


@dataclass(frozen=True)
class Distribution:
    """One parametric cost distribution: the atomic curve object.

    ``A`` is in quantity units (EJ for stocks, PJ/y or EJ/y for flows);
    ``B`` and ``C0`` are in ``cost_unit``.  ``C0`` may be negative.
    """

    kind: DistributionKind
    A: float
    B: float
    C0: float
    quantity_unit: str = "EJ"
    cost_unit: str = "USD2008/GJ"

    def __post_init__(self):
        if not self.A > 0.0:
            raise ValueError(f"technical potential A must be positive, got {self.A}")
        if not self.B > 0.0:
            raise ValueError(f"cost scale B must be positive, got {self.B}")

    def scaled(self, factor: float) -> "Distribution":
        """Same shape with the technical potential multiplied by ``factor``."""
        return Distribution(
            self.kind, self.A * factor, self.B, self.C0,
            self.quantity_unit, self.cost_unit,
        )


@dataclass(frozen=True)
class Productivity:
    """Energy yield per unit of effort or area.

    Costs relate to productivity through ``C = C_var / nu + C0``: better
    sites produce more per unit of effort, so cost falls as ``nu`` rises.
    Only this mapping is used here; curve construction happens in cost space.
    """

    nu: float

    def __post_init__(self):
        if not self.nu > 0.0:
            raise ValueError(f"productivity must be positive, got {self.nu}")

    def cost(self, c_var: float, c0: float) -> float:
        return c_var / self.nu + c0


def density(d: Distribution, C: float) -> float:
    """Quantity available per unit cost at cost ``C``; zero for C <= C0."""
    r = C - d.C0
    if r <= 0.0:
        return 0.0
    if d.kind is DistributionKind.HIERARCHICAL:
        return d.A * d.B / (r * r) * math.exp(-d.B / r)
    return d.A * _HALF_GAUSS_NORM / d.B * math.exp(-(r * r) / (2.0 * d.B * d.B))


def cumulative(d: Distribution, C: float) -> float:
    """Quantity available at or below cost ``C`` (the economic potential)."""
    r = C - d.C0
    if r <= 0.0:
        return 0.0
    if d.kind is DistributionKind.HIERARCHICAL:
        return d.A * math.exp(-d.B / r)
    return d.A * math.erf(r / (_SQRT2 * d.B))


def cost_at(d: Distribution, N: float) -> float:
    """Marginal cost after ``N`` units are in use: the cost-supply curve.

    ``N = 0`` returns ``C0`` (continuous extension) so ledgers start at a
    finite cost.  ``N >= A`` has no finite answer.
    """
    if N < 0.0:
        raise DomainError(f"quantity must be non-negative, got {N}")
    if N >= d.A:
        raise DepletionError(
            f"quantity {N} reaches the technical potential {d.A}: marginal cost diverges",
            feasible=d.A,
        )
    if N == 0.0:
        return d.C0
    frac = N / d.A
    if d.kind is DistributionKind.HIERARCHICAL:
        return -d.B / math.log(frac) + d.C0
    return _SQRT2 * d.B * erf_inv(frac) + d.C0


def erf_inv(x: float) -> float:
    """Inverse error function, accurate to |erf(erf_inv(x)) - x| <= 1e-12.

    Closed-form initial approximation (Winitzki) polished by Newton steps on
    ``erf``; the iteration is quadratically convergent and stops at double
    precision.
    """
    if not -1.0 < x < 1.0:
        raise DomainError(f"erf_inv requires -1 < x < 1, got {x}")
    if x == 0.0:
        return 0.0

    a = 0.147
    ln1mx2 = math.log1p(-x * x)
    term = 2.0 / (math.pi * a) + 0.5 * ln1mx2
    t = math.copysign(math.sqrt(math.sqrt(term * term - ln1mx2 / a) - term), x)

    for _ in range(60):
        err = math.erf(t) - x
        deriv = 2.0 / math.sqrt(math.pi) * math.exp(-t * t)
        if deriv == 0.0:
            break  # density underflow: t already at the double-precision tail
        dt = err / deriv
        t -= dt
        if abs(dt) <= 1e-16 * max(1.0, abs(t)):
            break
    return t
