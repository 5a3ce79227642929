"""Region definitions, proxy-weight disaggregation and re-aggregation.

Regional curves can be split down to countries by a proxy variable (cubed
wind speed times suitable area, insolation times area, coastline length) on
the assumption that the curve shape within a region is uniform: every
country inherits the parent's (kind, B, C0) and a share of A proportional
to its weight.  Re-aggregation is the exact horizontal sum, so any split
followed by a merge conserves the cumulative at every cost.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

from .curveset import CompositeCurve
from .distcore import Distribution
from .errors import CoverageError, ParseError, WeightError

__all__ = ["RegionDef", "RegionSet", "ProxyWeights", "disaggregate", "reaggregate"]


@dataclass(frozen=True)
class RegionDef:
    """One named region with its member country codes (ISO-3166 alpha-3)."""

    name: str
    members: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise ValueError(f"region {self.name!r} has no members")


@dataclass(frozen=True)
class RegionSet:
    regions: tuple[RegionDef, ...]

    def __post_init__(self):
        object.__setattr__(self, "regions", tuple(self.regions))
        seen: dict[str, str] = {}
        for r in self.regions:
            for c in r.members:
                if c in seen:
                    raise ValueError(
                        f"country {c} appears in both {seen[c]!r} and {r.name!r}"
                    )
                seen[c] = r.name

    @classmethod
    def from_csv(cls, path) -> "RegionSet":
        """Load from rows of (region, country); order of first appearance kept."""
        order: list[str] = []
        members: dict[str, list[str]] = {}
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip().lower() for h in header[:2]] != [
                "region",
                "country",
            ]:
                raise ParseError(f"{path}: expected header 'region,country'")
            for i, row in enumerate(reader, start=2):
                if not row or not "".join(row).strip():
                    continue
                if len(row) < 2:
                    raise ParseError(f"{path}: need two columns", row=i)
                region, country = row[0].strip(), row[1].strip()
                if region not in members:
                    order.append(region)
                    members[region] = []
                members[region].append(country)
        return cls(tuple(RegionDef(name, tuple(members[name])) for name in order))


@dataclass(frozen=True)
class ProxyWeights:
    """Non-negative weights per country, e.g. v^3 * suitable area for wind."""

    weights: dict[str, float]

    def __post_init__(self):
        for c, w in self.weights.items():
            if w < 0.0:
                raise WeightError(f"negative weight for {c}: {w}")

    @classmethod
    def from_csv(cls, path) -> "ProxyWeights":
        out: dict[str, float] = {}
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip().lower() for h in header[:2]] != [
                "country",
                "weight",
            ]:
                raise ParseError(f"{path}: expected header 'country,weight'")
            for i, row in enumerate(reader, start=2):
                if not row or not "".join(row).strip():
                    continue
                try:
                    out[row[0].strip()] = float(row[1])
                except (IndexError, ValueError) as exc:
                    raise ParseError(f"{path}: {exc}", row=i) from exc
        return cls(out)


def disaggregate(d: Distribution, weights: ProxyWeights) -> dict[str, Distribution]:
    """Split one curve to countries in proportion to their weights.

    Shares are computed in float; the largest share absorbs the residual so
    the country potentials sum to A exactly.
    """
    items = [(c, w) for c, w in weights.weights.items() if w > 0.0]
    total_w = sum(w for _, w in items)
    if total_w <= 0.0:
        raise WeightError("proxy weights sum to zero over the countries being split")
    shares = {c: d.A * (w / total_w) for c, w in items}
    residual = d.A - sum(shares.values())
    largest = max(shares, key=shares.get)
    shares[largest] += residual
    return {
        c: Distribution(d.kind, a, d.B, d.C0, d.quantity_unit, d.cost_unit)
        for c, a in shares.items()
    }


def reaggregate(
    country_curves: dict[str, CompositeCurve | Distribution],
    regions: RegionSet,
) -> dict[str, CompositeCurve]:
    """Horizontal sum of country curves within each region."""
    missing = [
        c for r in regions.regions for c in r.members if c not in country_curves
    ]
    if missing:
        raise CoverageError(
            f"no curve available for: {', '.join(sorted(set(missing)))}",
            missing=sorted(set(missing)),
        )
    out: dict[str, CompositeCurve] = {}
    for r in regions.regions:
        comps: list[Distribution] = []
        units = None
        for c in r.members:
            cur = country_curves[c]
            if isinstance(cur, Distribution):
                cur = CompositeCurve.of(cur, label=c)
            comps.extend(cur.components)
            units = (cur.quantity_unit, cur.cost_unit)
        out[r.name] = CompositeCurve(tuple(comps), r.name, units[0], units[1])
    return out
