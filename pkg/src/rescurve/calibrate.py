"""Distribution parameters from anchor points and cost bands.

Resource assessments rarely publish full curves; what is available is a
technical potential plus statements of the form "fraction delta of the
resource is available below cost C".  Two such (cost, fraction) anchors
determine ``B`` and ``C0`` in closed form for either family.

Stock tables give a cost band per occurrence class; the convention used
throughout is that 1% of the class lies below the band's lower edge and 90%
below its upper edge (geothermal uses a (5%, 95%) band instead).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .distcore import Distribution, DistributionKind, erf_inv
from .errors import DegenerateAnchors, InfeasibleAnchors

__all__ = [
    "Anchor",
    "hier_from_anchors",
    "ident_from_anchors",
    "stock_from_band",
    "DEFAULT_STOCK_QUANTILES",
]

_SQRT2 = math.sqrt(2.0)

# fraction of a stock occurrence class below the lower / upper band edge
DEFAULT_STOCK_QUANTILES = (0.01, 0.90)


@dataclass(frozen=True)
class Anchor:
    """A point on the cumulative curve: fraction ``delta`` of the technical
    potential is available at or below cost ``C``."""

    C: float
    delta: float

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"anchor fraction must lie in (0, 1), got {self.delta}")


def _check_pair(a1: Anchor, a2: Anchor):
    if a1.C == a2.C or a1.delta == a2.delta:
        raise DegenerateAnchors(
            f"anchors must differ in both cost and fraction: {a1} vs {a2}"
        )


def hier_from_anchors(
    a1: Anchor,
    a2: Anchor,
    A: float,
    quantity_unit: str = "EJ",
    cost_unit: str = "USD2008/GJ",
) -> Distribution:
    """Hierarchical distribution through two anchors (natural logs).

    ``C0 = (C2 ln d2 - C1 ln d1) / (ln d2 - ln d1)``;
    ``B = -(C1 - C0) ln d1``.
    """
    _check_pair(a1, a2)
    l1, l2 = math.log(a1.delta), math.log(a2.delta)
    c0 = (a2.C * l2 - a1.C * l1) / (l2 - l1)
    b = -(a1.C - c0) * l1
    if b <= 0.0:
        raise InfeasibleAnchors(
            f"anchors {a1}, {a2} give non-positive cost scale B={b}"
        )
    return Distribution(DistributionKind.HIERARCHICAL, A, b, c0, quantity_unit, cost_unit)


def ident_from_anchors(
    a1: Anchor,
    a2: Anchor,
    A: float,
    quantity_unit: str = "EJ",
    cost_unit: str = "USD2008/GJ",
) -> Distribution:
    """Nearly-identical distribution through two anchors.

    ``B = (C2 - C1) / (sqrt(2) (inverf d2 - inverf d1))``;
    ``C0 = C1 - sqrt(2) B inverf d1``.
    The signs are fixed so that the erf cumulative reproduces both anchors;
    an ordered pair (C1 < C2, d1 < d2) always yields B > 0.
    """
    _check_pair(a1, a2)
    i1, i2 = erf_inv(a1.delta), erf_inv(a2.delta)
    b = (a2.C - a1.C) / (_SQRT2 * (i2 - i1))
    if b <= 0.0:
        raise InfeasibleAnchors(
            f"anchors {a1}, {a2} give non-positive cost scale B={b}"
        )
    c0 = a1.C - _SQRT2 * b * i1
    return Distribution(
        DistributionKind.NEARLY_IDENTICAL, A, b, c0, quantity_unit, cost_unit
    )


def stock_from_band(
    A: float,
    c_lo: float,
    c_hi: float,
    quantiles: tuple[float, float] = DEFAULT_STOCK_QUANTILES,
    quantity_unit: str = "EJ",
    cost_unit: str = "USD2008/GJ",
) -> Distribution:
    """Hierarchical distribution for one stock occurrence class.

    ``quantiles`` states which fractions of the class sit below the band
    edges; the default (0.01, 0.90) applies to fossil and nuclear tables.
    """
    q_lo, q_hi = quantiles
    return hier_from_anchors(
        Anchor(c_lo, q_lo), Anchor(c_hi, q_hi), A, quantity_unit, cost_unit
    )
