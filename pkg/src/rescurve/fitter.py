"""Least-squares fit of a cumulative distribution to sparse data.

Used where a table provides a handful of (cost, cumulative quantity) points
rather than a band: uranium resource classes, and validation of family
choices against externally computed curves.  The optimizer is a
derivative-free simplex descent with three deterministic anchor-based
starts; the parameter space is tiny so robustness beats speed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .calibrate import Anchor, hier_from_anchors, ident_from_anchors
from .distcore import Distribution, DistributionKind, cumulative
from .errors import DegenerateData, MonotonicityError

__all__ = ["FitPoint", "FitResult", "augment", "fit"]

# assumed quantile positions of the (first positive, last) data points used
# to seed the simplex via the two-anchor closed forms
_SEED_QUANTILES = ((0.1, 0.9), (0.05, 0.8), (0.3, 0.95))

_MAX_ITER = 2000
_REL_FTOL = 1e-12


@dataclass(frozen=True)
class FitPoint:
    C: float
    N: float


@dataclass
class FitResult:
    dist: Distribution
    rmse: float
    per_point_residuals: list[float] = field(default_factory=list)
    converged: bool = False
    iterations: int = 0


def _check_monotone(points: list[FitPoint]):
    for p, q in zip(points, points[1:]):
        if q.C < p.C or q.N < p.N:
            raise MonotonicityError(
                f"points must be non-decreasing in cost and quantity: {p} then {q}"
            )
        if p.N < 0:
            raise MonotonicityError(f"negative cumulative quantity: {p}")


def augment(
    points: list[FitPoint],
    A_hint: float | None = None,
    saturation_cost_factor: float = 2.0,
) -> list[FitPoint]:
    """Add the two constraint points used for sparse cumulative tables.

    Prepends a zero anchor at cost 0 and appends a saturation point that
    repeats the last quantity at ``saturation_cost_factor`` times the last
    cost (the quantity assumed to equal the technical potential there, or
    ``A_hint`` when given).  Calling it on already-augmented data is a
    no-op: each anchor is added only when absent.
    """
    if len(points) < 2:
        raise MonotonicityError("need at least two data points to augment")
    _check_monotone(points)
    out = list(points)
    if out[0].N > 0.0:
        out.insert(0, FitPoint(min(0.0, out[0].C), 0.0))
    last = out[-1]
    if last.N > 0.0 and not (len(out) >= 2 and out[-2].N == last.N):
        sat_n = last.N if A_hint is None else max(A_hint, last.N)
        out.append(FitPoint(last.C * saturation_cost_factor, sat_n))
    return out


def _model(kind: DistributionKind, costs: np.ndarray, A: float, B: float, C0: float):
    r = costs - C0
    out = np.zeros_like(costs, dtype=float)
    pos = r > 0
    if kind is DistributionKind.HIERARCHICAL:
        out[pos] = A * np.exp(-B / r[pos])
    else:
        from scipy.special import erf

        out[pos] = A * erf(r[pos] / (np.sqrt(2.0) * B))
    return out


def _seed_guesses(kind, points: list[FitPoint]) -> list[tuple[float, float, float]]:
    positive = [p for p in points if p.N > 0]
    first, last = positive[0], positive[-1]
    n_max = max(p.N for p in points)
    guesses = []
    builder = (
        hier_from_anchors
        if kind is DistributionKind.HIERARCHICAL
        else ident_from_anchors
    )
    for d1, d2 in _SEED_QUANTILES:
        a_guess = n_max / d2
        try:
            d = builder(Anchor(first.C, d1), Anchor(last.C, d2), a_guess)
            guesses.append((d.A, d.B, d.C0))
        except Exception:
            pass
    if not guesses:
        span = max(last.C - first.C, 1e-6 * abs(last.C) + 1e-6)
        guesses.append((1.5 * n_max, 0.5 * span, first.C - 0.1 * span))
    return guesses


def fit(
    kind: DistributionKind,
    points: list[FitPoint],
    relative: bool = False,
    quantity_unit: str = "EJ",
    cost_unit: str = "USD2008/GJ",
) -> FitResult:
    """Fit (A, B, C0) by minimizing the sum of squared cumulative residuals.

    Residuals are absolute in quantity space by default; pass
    ``relative=True`` to weight each residual by its datum.  The fitted
    technical potential never falls below the largest datum.  The result is
    deterministic; non-convergence returns the best parameters found with
    ``converged=False`` rather than raising.
    """
    _check_monotone(points)
    if len(points) < 3:
        raise DegenerateData(f"need at least 3 points, got {len(points)}")
    if len({(p.C, p.N) for p in points}) < len(points):
        raise DegenerateData("duplicate data points")
    positive = [p for p in points if p.N > 0]
    if len({p.C for p in positive}) < 2:
        raise DegenerateData("need at least two distinct costs with positive quantity")

    costs = np.array([p.C for p in points], dtype=float)
    quants = np.array([p.N for p in points], dtype=float)
    n_max = float(quants.max())
    weights = 1.0 / np.maximum(np.abs(quants), 1e-12 * n_max) if relative else None

    def objective(theta):
        a, b, c0 = theta
        if a < n_max or b <= 0.0:
            return 1e30 * (1.0 + abs(a - n_max) / n_max + abs(min(b, 0.0)))
        res = _model(kind, costs, a, b, c0) - quants
        if weights is not None:
            res = res * weights
        return float(res @ res)

    best = None
    best_f = np.inf
    total_iter = 0
    converged = False
    for a0, b0, c00 in _seed_guesses(kind, points):
        x0 = np.array([max(a0, n_max * (1.0 + 1e-9)), b0, c00])
        prev_f = objective(x0)
        x = x0
        # restart the simplex until the objective stops improving in
        # relative terms (simplex descent can stall on its first collapse)
        for _ in range(4):
            res = minimize(
                objective,
                x,
                method="Nelder-Mead",
                options=dict(
                    maxiter=_MAX_ITER,
                    xatol=1e-12 * max(1.0, float(np.max(np.abs(x)))),
                    fatol=_REL_FTOL * max(1.0, prev_f),
                ),
            )
            total_iter += res.nit
            x = res.x
            if prev_f - res.fun <= _REL_FTOL * max(1.0, prev_f):
                converged = True
                break
            prev_f = res.fun
        if res.fun < best_f:
            best_f = float(res.fun)
            best = res.x

    a, b, c0 = best
    a = max(float(a), n_max)
    dist = Distribution(kind, a, float(b), float(c0), quantity_unit, cost_unit)
    fitted = np.array([cumulative(dist, c) for c in costs])
    residuals = (fitted - quants) / np.maximum(np.abs(quants), 1e-12 * n_max)
    rmse = float(np.sqrt(np.mean((fitted - quants) ** 2)))
    return FitResult(
        dist=dist,
        rmse=rmse,
        per_point_residuals=[float(r) for r in residuals],
        converged=converged,
        iterations=total_iter,
    )
