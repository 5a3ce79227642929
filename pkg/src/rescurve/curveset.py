"""Composite curves, tabulation, inversion, envelopes and curve sampling.

Aggregation over regions or occurrence types is a horizontal sum: quantities
add at equal cost, so the composite cumulative is the sum of the component
cumulatives.  Composites of several distributions have no closed-form
inverse, so marginal-cost queries go through a tabulated grid (1000 points
by default) and monotone piecewise-linear interpolation.

Uncertainty is carried as an envelope of three curves: the most probable
curve plus the bounds of the band in which the true curve lies with 96%
probability (2% below, 2% above).  Sampling maps a uniform draw through a
two-piece normal whose mode sits at the most probable total potential and
whose 2%/98% quantiles sit at the bounds, then interpolates between the
envelope curves.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import distcore
from .distcore import Distribution, DistributionKind, erf_inv
from .errors import DepletionError, DomainError, EnvelopeError, ParseError, UnitError

__all__ = [
    "CompositeCurve",
    "TabulatedCurve",
    "Envelope",
    "aggregate",
    "tabulate",
    "invert",
    "scale_envelope",
    "total_quantile",
    "sample",
    "DEFAULT_GRID_POINTS",
]

DEFAULT_GRID_POINTS = 1000

# grid span as fractions of each component's technical potential
_GRID_LO_FRACTION = 1e-4
_GRID_HI_FRACTION = 0.999


@dataclass(frozen=True)
class CompositeCurve:
    """A set of distributions whose cumulatives sum (a horizontal sum)."""

    components: tuple[Distribution, ...]
    label: str = ""
    quantity_unit: str = "EJ"
    cost_unit: str = "USD2008/GJ"

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        for d in self.components:
            if d.quantity_unit != self.quantity_unit or d.cost_unit != self.cost_unit:
                raise UnitError(
                    f"component units ({d.quantity_unit}, {d.cost_unit}) differ from "
                    f"curve units ({self.quantity_unit}, {self.cost_unit})"
                )

    @classmethod
    def of(cls, *components: Distribution, label: str = "") -> "CompositeCurve":
        first = components[0]
        return cls(tuple(components), label, first.quantity_unit, first.cost_unit)

    @property
    def potential(self) -> float:
        return sum(d.A for d in self.components)

    @property
    def min_c0(self) -> float:
        if not self.components:
            return 0.0
        return min(d.C0 for d in self.components)

    def cumulative(self, C: float) -> float:
        return sum(distcore.cumulative(d, C) for d in self.components)

    def scaled(self, factor: float, label: str = "") -> "CompositeCurve":
        if factor == 0.0:
            return CompositeCurve((), label, self.quantity_unit, self.cost_unit)
        return CompositeCurve(
            tuple(d.scaled(factor) for d in self.components),
            label,
            self.quantity_unit,
            self.cost_unit,
        )

    def default_range(self) -> tuple[float, float]:
        """Cost span covering essentially all of the curve's mass."""
        if not self.components:
            raise DomainError("empty curve has no cost range")
        lo = min(
            distcore.cost_at(d, _GRID_LO_FRACTION * d.A) for d in self.components
        )
        hi = max(
            distcore.cost_at(d, _GRID_HI_FRACTION * d.A) for d in self.components
        )
        return lo, hi


def aggregate(curves: list[CompositeCurve], label: str = "") -> CompositeCurve:
    """Horizontal sum: concatenates components; cumulatives add exactly."""
    if not curves:
        return CompositeCurve((), label)
    first = curves[0]
    comps: list[Distribution] = []
    for c in curves:
        if (c.quantity_unit, c.cost_unit) != (first.quantity_unit, first.cost_unit):
            raise UnitError(
                f"cannot aggregate {c.label!r} ({c.quantity_unit}, {c.cost_unit}) with "
                f"{first.label!r} ({first.quantity_unit}, {first.cost_unit})"
            )
        comps.extend(c.components)
    return CompositeCurve(tuple(comps), label, first.quantity_unit, first.cost_unit)


@dataclass(frozen=True)
class TabulatedCurve:
    """Cumulative quantities on a strictly increasing cost grid."""

    costs: np.ndarray
    quantities: np.ndarray
    quantity_unit: str = "EJ"
    cost_unit: str = "USD2008/GJ"

    def __post_init__(self):
        costs = np.asarray(self.costs, dtype=float)
        quants = np.asarray(self.quantities, dtype=float)
        if costs.ndim != 1 or costs.shape != quants.shape or costs.size < 2:
            raise DomainError("grid needs two equal-length 1-d arrays of length >= 2")
        if np.any(np.diff(costs) <= 0):
            raise DomainError("cost grid must be strictly increasing")
        if np.any(np.diff(quants) < 0):
            raise DomainError("quantities must be non-decreasing")
        object.__setattr__(self, "costs", costs)
        object.__setattr__(self, "quantities", quants)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                [f"cost_{self.cost_unit}", f"cumulative_quantity_{self.quantity_unit}"]
            )
            for c, q in zip(self.costs, self.quantities):
                writer.writerow([repr(float(c)), repr(float(q))])

    @classmethod
    def from_csv(cls, path) -> "TabulatedCurve":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or len(rows[0]) != 2:
            raise ParseError(f"{path}: expected two columns with a unit-bearing header")
        header = rows[0]
        if not header[0].startswith("cost_") or not header[1].startswith(
            "cumulative_quantity_"
        ):
            raise ParseError(f"{path}: unrecognised header {header}")
        cost_unit = header[0][len("cost_"):]
        quantity_unit = header[1][len("cumulative_quantity_"):]
        try:
            data = np.array([[float(r[0]), float(r[1])] for r in rows[1:]])
        except (ValueError, IndexError) as exc:
            raise ParseError(f"{path}: {exc}") from exc
        return cls(data[:, 0], data[:, 1], quantity_unit, cost_unit)

    def to_json_dict(self) -> dict:
        return {
            "cost_unit": self.cost_unit,
            "quantity_unit": self.quantity_unit,
            "costs": [float(c) for c in self.costs],
            "quantities": [float(q) for q in self.quantities],
        }

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh)

    @classmethod
    def from_json_dict(cls, obj: dict) -> "TabulatedCurve":
        return cls(
            np.array(obj["costs"]),
            np.array(obj["quantities"]),
            obj["quantity_unit"],
            obj["cost_unit"],
        )


def tabulate(
    curve: CompositeCurve,
    c_min: float | None = None,
    c_max: float | None = None,
    n: int = DEFAULT_GRID_POINTS,
) -> TabulatedCurve:
    """Evaluate the composite cumulative on an ``n``-point cost grid.

    The grid is geometric in cost above the lowest component offset, because
    hierarchical curves stay flat over decades of cost before diverging.
    """
    if c_min is None or c_max is None:
        lo, hi = curve.default_range()
        c_min = lo if c_min is None else c_min
        c_max = hi if c_max is None else c_max
    if not c_min < c_max:
        raise DomainError(f"need c_min < c_max, got ({c_min}, {c_max})")
    if n < 2:
        raise DomainError(f"need at least 2 grid points, got {n}")
    base = curve.min_c0
    if c_min <= base:
        raise DomainError(
            f"grid must start above the lowest cost offset {base}, got {c_min}"
        )
    grid = base + np.geomspace(c_min - base, c_max - base, n)
    grid[0], grid[-1] = c_min, c_max  # pin the requested endpoints exactly
    quants = np.array([curve.cumulative(c) for c in grid])
    quants = np.maximum.accumulate(quants)  # guard round-off wiggles
    return TabulatedCurve(grid, quants, curve.quantity_unit, curve.cost_unit)


def invert(tab: TabulatedCurve, N: float) -> float:
    """Marginal cost at cumulative quantity ``N`` (piecewise-linear)."""
    if N < 0.0:
        raise DomainError(f"quantity must be non-negative, got {N}")
    q_max = float(tab.quantities[-1])
    if N > q_max:
        raise DepletionError(
            f"quantity {N} exceeds the tabulated potential {q_max}", feasible=q_max
        )
    return float(np.interp(N, tab.quantities, tab.costs))


@dataclass(frozen=True)
class Envelope:
    """Lower (2%), most probable, and upper (98%) curves of the 96% band."""

    lower: CompositeCurve
    mode: CompositeCurve
    upper: CompositeCurve
    label: str = ""

    def __post_init__(self):
        lo, m, up = self.lower.potential, self.mode.potential, self.upper.potential
        if not (lo <= m * (1 + 1e-12) and m <= up * (1 + 1e-12)):
            raise EnvelopeError(
                f"total potentials must be ordered, got L={lo}, M={m}, U={up}"
            )

    def curve(self, bound: str) -> CompositeCurve:
        try:
            return {"lower": self.lower, "mode": self.mode, "upper": self.upper}[bound]
        except KeyError:
            raise DomainError(f"unknown bound {bound!r}") from None

    def ordering_violation(self, n: int = DEFAULT_GRID_POINTS) -> float:
        """Worst (most negative) cumulative gap over an ``n``-point grid.

        Returns >= 0 when N_lower <= N_mode <= N_upper holds everywhere.
        """
        lo, hi = self.upper.default_range()
        base = self.upper.min_c0
        grid = base + np.geomspace(lo - base, hi - base, n)
        worst = np.inf
        for c in grid:
            nl, nm, nu = (
                self.lower.cumulative(c),
                self.mode.cumulative(c),
                self.upper.cumulative(c),
            )
            worst = min(worst, nm - nl, nu - nm)
        return float(worst)


def scale_envelope(mode: CompositeCurve, A_lower: float, A_upper: float) -> Envelope:
    """Envelope from a mode curve and the bounds of its total potential.

    The bounds keep the mode's shape: every component potential is scaled by
    the same factor, leaving B and C0 unchanged (so the curves never cross).
    """
    total = mode.potential
    if not (A_lower <= total <= A_upper):
        raise EnvelopeError(
            f"bounds must bracket the mode potential: {A_lower} <= {total} <= {A_upper}"
        )
    lower = mode.scaled(A_lower / total, label=f"{mode.label}/lower")
    upper = mode.scaled(A_upper / total, label=f"{mode.label}/upper")
    return Envelope(lower, mode, upper, label=mode.label)


# -- two-piece normal over the total potential --------------------------------

_TAIL = 0.02  # probability below the lower and above the upper bound


def _solve_split_sigmas(L: float, m: float, U: float) -> tuple[float, float]:
    """Widths (sigma1, sigma2) pinning the 2% quantile at L and 98% at U."""
    sqrt2 = math.sqrt(2.0)

    def a_of(r):  # (m - L) / sigma1
        return sqrt2 * erf_inv(1.0 - _TAIL * (1.0 + r))

    def b_of(r):  # (U - m) / sigma2
        p = 1.0 / (1.0 + r)
        return sqrt2 * erf_inv(((1.0 - _TAIL) - p) / (1.0 - p))

    def gap(r):
        return (U - m) / b_of(r) - r * (m - L) / a_of(r)

    # r = sigma2/sigma1 must keep both tail fractions feasible:
    # p > 0.02 demands r < (1 - tail)/tail - 1; p < 0.98 demands the mirror
    r_lo = _TAIL / (1.0 - _TAIL) + 1e-9
    r_hi = (1.0 - _TAIL) / _TAIL - 1e-9
    r = brentq(gap, r_lo, r_hi, xtol=1e-14, rtol=1e-14)
    return (m - L) / a_of(r), (U - m) / b_of(r)


def total_quantile(env: Envelope, u) -> np.ndarray | float:
    """Quantile of the total potential at probability ``u`` (vectorizable)."""
    from scipy.special import erfinv as _vec_erfinv

    scalar = np.isscalar(u)
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0.0) or np.any(u >= 1.0):
        raise DomainError("u must lie strictly inside (0, 1)")

    L, m, U = env.lower.potential, env.mode.potential, env.upper.potential
    if U - L <= 1e-12 * max(U, 1.0):
        out = np.full_like(u, m)
        return float(out) if scalar else out
    if m - L <= 1e-12 * (U - L):
        # no room below the mode: one-piece upper half-normal
        s2 = (U - m) / (math.sqrt(2.0) * erf_inv((0.98 - _TAIL) / (1.0 - _TAIL)))
        out = np.where(
            u <= _TAIL, L, m + math.sqrt(2.0) * s2 * _vec_erfinv((u - _TAIL) / (1.0 - _TAIL))
        )
    elif U - m <= 1e-12 * (U - L):
        s1 = (m - L) / (math.sqrt(2.0) * erf_inv((0.98 - _TAIL) / (1.0 - _TAIL)))
        out = np.where(
            u >= 1.0 - _TAIL,
            U,
            m + math.sqrt(2.0) * s1 * _vec_erfinv(u / (1.0 - _TAIL) - 1.0),
        )
    else:
        s1, s2 = _solve_split_sigmas(L, m, U)
        p = s1 / (s1 + s2)
        below = u < p
        out = np.where(
            below,
            m + math.sqrt(2.0) * s1 * _vec_erfinv(np.minimum(u, p) / p - 1.0),
            m + math.sqrt(2.0) * s2 * _vec_erfinv((np.maximum(u, p) - p) / (1.0 - p)),
        )
    out = np.maximum(out, 0.0)
    return float(out) if scalar else out


def sample(env: Envelope, u: float) -> CompositeCurve:
    """One curve drawn from the envelope at probability level ``u``.

    The draw's total potential is the two-piece normal quantile; the curve is
    the quantity-space interpolation between the neighbouring envelope
    curves, so u = 0.02 returns the lower curve and u = 0.98 the upper.
    """
    if not 0.0 < u < 1.0:
        raise DomainError(f"u must lie strictly inside (0, 1), got {u}")
    x = total_quantile(env, u)
    L, m, U = env.lower.potential, env.mode.potential, env.upper.potential
    label = f"{env.label}@u={u:g}"

    def blend(c_a: CompositeCurve, c_b: CompositeCurve, t: float) -> CompositeCurve:
        comps = tuple(d.scaled(1.0 - t) for d in c_a.components if 1.0 - t > 0.0)
        comps += tuple(d.scaled(t) for d in c_b.components if t > 0.0)
        return CompositeCurve(comps, label, env.mode.quantity_unit, env.mode.cost_unit)

    if x <= L:
        if L == 0.0:
            return CompositeCurve((), label, env.mode.quantity_unit, env.mode.cost_unit)
        return env.lower.scaled(x / L, label)
    if x <= m:
        return blend(env.lower, env.mode, (x - L) / (m - L))
    if x <= U:
        return blend(env.mode, env.upper, (x - m) / (U - m))
    return env.upper.scaled(x / U, label)
