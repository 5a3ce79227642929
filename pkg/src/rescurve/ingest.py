"""Data loading, unit conversion, and resource-by-resource curve recipes.

The shipped CSV tables carry regional resource amounts (stocks), cost
bands per occurrence class, and pre-derived curve parameters (renewables).
Each resource has a recipe mapping confidence classes to the three bound
curves: reserves are taken to exist with 98% probability, so they enter
the lower curve; successively less certain classes enter the mode and
upper curves.

All stock curves are normalized internally to EJ and USD2008/GJ; power
sector renewables stay in PJ/y and USD2008/MWh as tabulated.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field, replace

from .calibrate import stock_from_band
from .curveset import CompositeCurve, Envelope, aggregate
from .distcore import Distribution, DistributionKind
from .errors import (
    ParseError,
    RecipeError,
    RescurveError,
    UnitError,
    ValidationError,
)
from .fitter import FitPoint, augment, fit

__all__ = [
    "RenewableParamRecord",
    "StockRecord",
    "CostBand",
    "UnitTable",
    "Database",
    "default_data_dir",
    "load_printed_totals",
    "load_renewable_params",
    "load_biomass_params",
    "load_geothermal_params",
    "load_stock_table",
    "load_cost_bands",
    "load_envelope_bounds",
    "to_energy",
    "build_resource",
    "build_all",
    "RESOURCES",
    "REGIONS",
]

REGIONS = (
    "USA", "Canada", "EU-15", "Rest Europe", "Russia", "China", "Japan",
    "India", "Rest Asia", "Oceania", "Brazil", "Rest America", "Africa",
    "Middle East",
)

RESOURCES = (
    "hydro", "wind", "solar", "biomass", "geothermal", "ocean",
    "oil", "gas", "hard_coal", "soft_coal", "uranium", "thorium",
)

GLOBAL = "Global"

# row sums may disagree with a table's printed Total by a few units
# (rounding in the source); anything larger indicates corrupted data
_CHECKSUM_ABS = 3.0
_CHECKSUM_REL = 1e-3


def default_data_dir() -> str:
    return os.path.join(os.path.dirname(__file__), "data")


@dataclass(frozen=True)
class RenewableParamRecord:
    """One row of a renewable parameter table (units PJ/y, USD2008/MWh)."""

    resource: str
    region: str
    kind: DistributionKind
    A: float
    B: float
    C0: float
    variant: str = ""  # biomass scenario or geothermal use_belt tag


@dataclass(frozen=True)
class StockRecord:
    """One regional amount of a stock resource in its native unit."""

    resource: str
    occurrence: str
    confidence: str
    region: str
    amount: float
    amount_unit: str


@dataclass(frozen=True)
class CostBand:
    lower: float
    upper: float
    unit: str

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValidationError(
                f"cost band must satisfy lower < upper, got ({self.lower}, {self.upper})"
            )


@dataclass(frozen=True)
class UnitTable:
    """Conversion constants between native table units and EJ / USD per GJ.

    The coal and gas calorific constants are effective mass-weighted values
    (hard coal sits in the 16.5-35 GJ/t range, soft in 11-16.5); override
    any of them through the config file if better data is available.
    """

    oil_EJ_per_Mtoe: float = 0.041868
    gas_EJ_per_Gm3: float = 0.0373
    hard_coal_GJ_per_t: float = 29.9
    soft_coal_GJ_per_t: float = 14.9
    uranium_TJ_per_t: float = 159.0
    thorium_TJ_per_t: float = 2100.0
    oil_GJ_per_boe: float = 6.12

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            if not getattr(self, name) > 0.0:
                raise UnitError(f"conversion constant {name} must be positive")

    @classmethod
    def from_config(cls, path) -> "UnitTable":
        """Read key=value overrides; unknown keys are rejected."""
        overrides = {}
        with open(path) as fh:
            for i, line in enumerate(fh, start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ParseError(f"{path}: expected key=value", row=i)
                key, value = (s.strip() for s in line.split("=", 1))
                if key not in cls.__dataclass_fields__:
                    raise ParseError(f"{path}: unknown constant {key!r}", row=i)
                try:
                    overrides[key] = float(value)
                except ValueError as exc:
                    raise ParseError(f"{path}: {exc}", row=i) from exc
        return cls(**overrides)

    def ej_per_native(self, resource: str) -> float:
        """EJ per native amount unit (Mtoe, Gm3, Mt or t)."""
        table = {
            "oil": self.oil_EJ_per_Mtoe,
            "gas": self.gas_EJ_per_Gm3,
            "hard_coal": self.hard_coal_GJ_per_t * 1e6 * 1e-9,  # Mt -> EJ
            "soft_coal": self.soft_coal_GJ_per_t * 1e6 * 1e-9,
            "uranium": self.uranium_TJ_per_t * 1e-6,  # t -> EJ
            "thorium": self.thorium_TJ_per_t * 1e-6,
        }
        try:
            return table[resource]
        except KeyError:
            raise UnitError(f"no energy conversion for resource {resource!r}") from None

    def cost_to_gj(self, cost: float, resource: str) -> float:
        """Native cost (per boe, GJ, t or kg) to USD2008 per GJ."""
        # 1 TJ/t equals 1 GJ/kg, so USD/kg divided by TJ/t gives USD/GJ
        divisor = {
            "oil": self.oil_GJ_per_boe,
            "gas": 1.0,
            "hard_coal": self.hard_coal_GJ_per_t,
            "soft_coal": self.soft_coal_GJ_per_t,
            "uranium": self.uranium_TJ_per_t,
            "thorium": self.thorium_TJ_per_t,
        }
        try:
            return cost / divisor[resource]
        except KeyError:
            raise UnitError(f"no cost conversion for resource {resource!r}") from None


def to_energy(amount: float, resource: str, units: UnitTable) -> float:
    """Native amount to EJ."""
    return amount * units.ej_per_native(resource)


# -- CSV loaders ---------------------------------------------------------------


def _read_rows(path, expected_columns) -> list[dict]:
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or [
                c.strip() for c in reader.fieldnames
            ] != list(expected_columns):
                raise ParseError(
                    f"{path}: expected columns {list(expected_columns)}, "
                    f"got {reader.fieldnames}"
                )
            return list(reader)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def _kind(text: str, path, row) -> DistributionKind:
    try:
        return DistributionKind(text.strip())
    except ValueError:
        raise ParseError(f"{path}: unknown distribution kind {text!r}", row=row) from None


def load_printed_totals(path) -> dict[tuple[str, str], float]:
    rows = _read_rows(path, ("table", "column", "total"))
    return {(r["table"], r["column"]): float(r["total"]) for r in rows}


def _check_total(computed: float, printed: float, what: str):
    if abs(computed - printed) > max(_CHECKSUM_ABS, _CHECKSUM_REL * abs(printed)):
        raise ValidationError(
            f"{what}: row sum {computed} disagrees with printed total {printed}"
        )


def load_renewable_params(
    path, totals: dict | None = None
) -> list[RenewableParamRecord]:
    """Hydro, wind, solar, wave and tidal parameter rows."""
    rows = _read_rows(
        path,
        ("resource", "region", "kind", "A_PJ_per_y", "B_USD2008_per_MWh",
         "C0_USD2008_per_MWh"),
    )
    records = []
    for i, r in enumerate(rows, start=2):
        try:
            records.append(
                RenewableParamRecord(
                    r["resource"], r["region"], _kind(r["kind"], path, i),
                    float(r["A_PJ_per_y"]), float(r["B_USD2008_per_MWh"]),
                    float(r["C0_USD2008_per_MWh"]),
                )
            )
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{path}: {exc}", row=i) from exc
    if totals is not None:
        for resource in ("hydro", "wind", "solar", "wave", "tidal"):
            subset = [r for r in records if r.resource == resource]
            if sorted(r.region for r in subset) != sorted(REGIONS):
                raise ValidationError(f"{path}: {resource} must cover all 14 regions")
            _check_total(
                sum(r.A for r in subset),
                totals[("renewable", resource)],
                f"{path}:{resource}",
            )
    return records


def load_biomass_params(path, totals: dict | None = None) -> list[RenewableParamRecord]:
    rows = _read_rows(
        path,
        ("scenario", "region", "kind", "A_PJ_per_y", "B_USD2008_per_MWh",
         "C0_USD2008_per_MWh"),
    )
    records = []
    for i, r in enumerate(rows, start=2):
        try:
            records.append(
                RenewableParamRecord(
                    "biomass", r["region"], _kind(r["kind"], path, i),
                    float(r["A_PJ_per_y"]), float(r["B_USD2008_per_MWh"]),
                    float(r["C0_USD2008_per_MWh"]), variant=r["scenario"],
                )
            )
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{path}: {exc}", row=i) from exc
    if totals is not None:
        for scenario in ("A1", "A2", "B1", "B2"):
            subset = [r for r in records if r.variant == scenario]
            _check_total(
                sum(r.A for r in subset),
                totals[("biomass", scenario)],
                f"{path}:{scenario}",
            )
    return records


def load_geothermal_params(
    path, totals: dict | None = None
) -> list[RenewableParamRecord]:
    rows = _read_rows(
        path,
        ("use", "belt", "region", "kind", "A_PJ_per_y", "B_USD2008_per_MWh",
         "C0_USD2008_per_MWh"),
    )
    records = []
    for i, r in enumerate(rows, start=2):
        try:
            records.append(
                RenewableParamRecord(
                    "geothermal", r["region"], _kind(r["kind"], path, i),
                    float(r["A_PJ_per_y"]), float(r["B_USD2008_per_MWh"]),
                    float(r["C0_USD2008_per_MWh"]),
                    variant=f"{r['use']}_{r['belt']}",
                )
            )
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{path}: {exc}", row=i) from exc
    if totals is not None:
        for variant in ("direct_in", "direct_out", "electricity_in", "electricity_out"):
            subset = [r for r in records if r.variant == variant]
            _check_total(
                sum(r.A for r in subset),
                totals[("geothermal", variant)],
                f"{path}:{variant}",
            )
    return records


_STOCK_SCHEMAS = {
    "oil": (("occurrence", "class", "region", "amount_Mtoe"), "Mtoe"),
    "gas": (("occurrence", "class", "region", "amount_Gm3"), "Gm3"),
    "coal": (("rank", "class", "confidence", "region", "amount_Mt"), "Mt"),
    "uranium": (("confidence", "region", "ceiling_USD2008_per_kg", "amount_t"), "t"),
    "thorium": (("confidence", "region", "amount_t"), "t"),
}


def load_stock_table(path, resource: str, totals: dict | None = None) -> list[StockRecord]:
    """Regional stock amounts; see _STOCK_SCHEMAS for the per-family layout.

    Coal rows split into the hard_coal and soft_coal resources by rank.
    Uranium amounts are cumulative below the cost ceiling carried in the
    occurrence field ("40", "80", "130", "260" or "NA" for unassigned).
    """
    if resource not in _STOCK_SCHEMAS:
        raise UnitError(f"unknown stock resource {resource!r}")
    columns, unit = _STOCK_SCHEMAS[resource]
    rows = _read_rows(path, columns)
    records = []
    for i, r in enumerate(rows, start=2):
        try:
            amount = float(r[columns[-1]])
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{path}: {exc}", row=i) from exc
        if amount < 0:
            raise ValidationError(f"{path} row {i}: negative amount {amount}")
        if resource == "oil" or resource == "gas":
            rec = StockRecord(resource, r["occurrence"], r["class"], r["region"], amount, unit)
        elif resource == "coal":
            rec = StockRecord(
                f"{r['rank']}_coal", r["rank"], f"{r['class']}_{r['confidence']}",
                r["region"], amount, unit,
            )
        elif resource == "uranium":
            rec = StockRecord(
                "uranium", r["ceiling_USD2008_per_kg"], r["confidence"],
                r["region"], amount, unit,
            )
        else:
            rec = StockRecord("thorium", "thorium", r["confidence"], r["region"], amount, unit)
        records.append(rec)

    if totals is not None:
        _validate_stock_totals(path, resource, records, totals)
    return records


def _validate_stock_totals(path, resource, records, totals):
    def column_sum(pred):
        return sum(r.amount for r in records if pred(r))

    if resource == "oil":
        keys = [k for (t, k) in totals if t == "oil"]
        for key in keys:
            occ, cls = key.rsplit("_", 1)
            _check_total(
                column_sum(lambda r: r.occurrence == occ and r.confidence == cls),
                totals[("oil", key)], f"{path}:{key}",
            )
    elif resource == "gas":
        for (t, key), printed in totals.items():
            if t != "gas":
                continue
            occ, cls = key.rsplit("_", 1)
            _check_total(
                column_sum(lambda r: r.occurrence == occ and r.confidence == cls),
                printed, f"{path}:{key}",
            )
    elif resource == "coal":
        for (t, key), printed in totals.items():
            if t != "coal":
                continue
            rank, cls, conf = key.split("_")
            _check_total(
                column_sum(
                    lambda r: r.resource == f"{rank}_coal"
                    and r.confidence == f"{cls}_{conf}"
                ),
                printed, f"{path}:{key}",
            )
    elif resource == "uranium":
        for (t, key), printed in totals.items():
            if t != "uranium":
                continue
            conf, ceiling = key.rsplit("_", 1)
            _check_total(
                column_sum(
                    lambda r: r.confidence == conf and r.occurrence == ceiling
                ),
                printed, f"{path}:{key}",
            )
    else:
        for (t, key), printed in totals.items():
            if t != "thorium":
                continue
            _check_total(
                column_sum(lambda r: r.confidence == key),
                printed, f"{path}:{key}",
            )


def load_cost_bands(path) -> dict[tuple[str, str, str], CostBand]:
    rows = _read_rows(
        path, ("resource", "occurrence", "class", "lower", "upper", "cost_unit")
    )
    out = {}
    for i, r in enumerate(rows, start=2):
        try:
            out[(r["resource"], r["occurrence"], r["class"])] = CostBand(
                float(r["lower"]), float(r["upper"]), r["cost_unit"]
            )
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{path}: {exc}", row=i) from exc
    return out


def load_envelope_bounds(path) -> dict[str, tuple[float, float]]:
    rows = _read_rows(path, ("resource", "lower_PJ_per_y", "upper_PJ_per_y"))
    return {
        r["resource"]: (float(r["lower_PJ_per_y"]), float(r["upper_PJ_per_y"]))
        for r in rows
    }


# -- recipes -------------------------------------------------------------------

# (occurrence, class, multiplier) entries included in each bound curve
_OIL_RECIPE = {
    "lower": [("crude", "reserves", 1.0), ("sands", "reserves", 1.0),
              ("heavy", "reserves", 1.0)],
    "mode": [("crude", "reserves", 1.0), ("crude", "resources", 1.0),
             ("shale", "resources", 1.0), ("sands", "reserves", 1.0),
             ("sands", "resources", 1.0), ("heavy", "reserves", 1.0),
             ("heavy", "resources", 1.0)],
    # half of the shale resources enter on top of the mode's full inclusion
    "upper": [("crude", "reserves", 1.0), ("crude", "resources", 1.0),
              ("shale", "resources", 1.5), ("sands", "reserves", 1.0),
              ("sands", "resources", 1.0), ("sands", "additional", 1.0),
              ("heavy", "reserves", 1.0), ("heavy", "resources", 1.0),
              ("heavy", "additional", 1.0)],
}

_GAS_RECIPE = {
    "lower": [("conventional", "reserves", 1.0)],
    "mode": [("conventional", "reserves", 1.0), ("shale", "reserves", 1.0),
             ("tight", "reserves", 1.0), ("conventional", "resources", 0.5),
             ("shale", "resources", 0.5), ("tight", "resources", 0.5),
             ("cbm", "reserves", 0.5)],
    "upper": [("conventional", "reserves", 1.0), ("conventional", "resources", 1.0),
              ("shale", "reserves", 1.0), ("shale", "resources", 1.0),
              ("tight", "reserves", 1.0), ("tight", "resources", 1.0),
              ("cbm", "reserves", 1.0), ("cbm", "resources", 1.0),
              ("hydrates", "reserves", 1.0), ("hydrates", "resources", 1.0)],
}

# coal classes are class_confidence pairs; the same recipe serves both ranks
_COAL_RECIPE = {
    "lower": [("reserves_proven", 1.0)],
    "mode": [("reserves_proven", 1.0), ("reserves_probable", 1.0),
             ("resources_proven", 0.5), ("resources_probable", 0.5)],
    "upper": [("reserves_proven", 1.0), ("reserves_probable", 1.0),
              ("reserves_possible", 1.0), ("resources_proven", 1.0),
              ("resources_probable", 1.0), ("resources_possible", 1.0)],
}

_THORIUM_RECIPE = {
    "lower": ["rar"],
    "mode": ["rar", "inferred"],
    "upper": ["rar", "inferred", "identified", "prognosticated"],
}

_URANIUM_CLASSES = {
    "lower": ("rar",),
    "mode": ("rar", "inferred"),
    "upper": ("rar", "inferred", "prognosticated", "speculative"),
}

_URANIUM_CEILINGS = ("40", "80", "130", "260")


@dataclass
class Database:
    """All envelopes by resource and region, plus the build report."""

    resources: dict[str, dict[str, Envelope]]
    biomass_scenarios: dict[str, dict[str, CompositeCurve]] = field(default_factory=dict)
    report: dict = field(default_factory=dict)

    def envelope(self, resource: str, region: str = GLOBAL) -> Envelope:
        try:
            return self.resources[resource][region]
        except KeyError:
            raise RescurveError(
                f"no envelope for resource {resource!r}, region {region!r}"
            ) from None

    # -- serialization --

    @staticmethod
    def _curve_to_dict(curve: CompositeCurve) -> dict:
        return {
            "label": curve.label,
            "quantity_unit": curve.quantity_unit,
            "cost_unit": curve.cost_unit,
            "components": [
                {"kind": d.kind.value, "A": d.A, "B": d.B, "C0": d.C0}
                for d in curve.components
            ],
        }

    @staticmethod
    def _curve_from_dict(obj: dict) -> CompositeCurve:
        comps = tuple(
            Distribution(
                DistributionKind(c["kind"]), c["A"], c["B"], c["C0"],
                obj["quantity_unit"], obj["cost_unit"],
            )
            for c in obj["components"]
        )
        return CompositeCurve(comps, obj["label"], obj["quantity_unit"], obj["cost_unit"])

    def to_json_dict(self) -> dict:
        return {
            "resources": {
                res: {
                    region: {
                        "lower": self._curve_to_dict(env.lower),
                        "mode": self._curve_to_dict(env.mode),
                        "upper": self._curve_to_dict(env.upper),
                    }
                    for region, env in regions.items()
                }
                for res, regions in self.resources.items()
            },
            "biomass_scenarios": {
                scen: {
                    region: self._curve_to_dict(curve)
                    for region, curve in curves.items()
                }
                for scen, curves in self.biomass_scenarios.items()
            },
            "report": self.report,
        }

    def save(self, path):
        tmp = f"{path}.tmp.{os.getpid()}"
        with open(tmp, "w") as fh:
            json.dump(self.to_json_dict(), fh, sort_keys=True)
        os.replace(tmp, path)

    @classmethod
    def from_json_dict(cls, obj: dict) -> "Database":
        resources = {
            res: {
                region: Envelope(
                    cls._curve_from_dict(bounds["lower"]),
                    cls._curve_from_dict(bounds["mode"]),
                    cls._curve_from_dict(bounds["upper"]),
                    label=f"{res}/{region}",
                )
                for region, bounds in regions.items()
            }
            for res, regions in obj["resources"].items()
        }
        scenarios = {
            scen: {
                region: cls._curve_from_dict(curve)
                for region, curve in curves.items()
            }
            for scen, curves in obj.get("biomass_scenarios", {}).items()
        }
        return cls(resources, scenarios, obj.get("report", {}))

    @classmethod
    def load(cls, path) -> "Database":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


# -- per-resource builders -----------------------------------------------------


def _scaled_envelopes(
    mode_by_region: dict[str, CompositeCurve],
    bounds: tuple[float, float],
    label: str,
) -> dict[str, Envelope]:
    """Envelopes from regional modes and global potential bounds.

    The global lower/upper scale factors apply uniformly to every region,
    so regional envelopes aggregate exactly to the global one.
    """
    global_mode = aggregate(list(mode_by_region.values()), label)
    total = global_mode.potential
    a_lo, a_hi = bounds
    if not a_lo <= total <= a_hi:
        raise ValidationError(
            f"{label}: mode potential {total} outside bounds ({a_lo}, {a_hi})"
        )
    f_lo, f_hi = a_lo / total, a_hi / total
    out = {
        GLOBAL: Envelope(
            global_mode.scaled(f_lo, f"{label}/lower"),
            global_mode,
            global_mode.scaled(f_hi, f"{label}/upper"),
            label,
        )
    }
    for region, mode in mode_by_region.items():
        out[region] = Envelope(
            mode.scaled(f_lo, f"{label}/{region}/lower"),
            mode,
            mode.scaled(f_hi, f"{label}/{region}/upper"),
            f"{label}/{region}",
        )
    return out


def _build_simple_renewable(records, resource, bounds) -> dict[str, Envelope]:
    modes = {}
    for r in records:
        if r.resource != resource or r.A <= 0:
            continue
        d = Distribution(r.kind, r.A, r.B, r.C0, "PJ/y", "USD2008/MWh")
        modes[r.region] = CompositeCurve.of(d, label=f"{resource}/{r.region}")
    return _scaled_envelopes(modes, bounds, resource)


def _build_multi_renewable(records, resource, bounds) -> dict[str, Envelope]:
    """Resources whose regional mode stacks several sub-curves (geothermal,
    ocean = wave + tidal)."""
    modes: dict[str, list[Distribution]] = {}
    for r in records:
        if r.A <= 0:
            continue  # zero-potential sub-curves contribute nothing
        modes.setdefault(r.region, []).append(
            Distribution(r.kind, r.A, r.B, r.C0, "PJ/y", "USD2008/MWh")
        )
    curves = {
        region: CompositeCurve(tuple(ds), f"{resource}/{region}", "PJ/y", "USD2008/MWh")
        for region, ds in modes.items()
    }
    return _scaled_envelopes(curves, bounds, resource)


def _build_biomass(records, bounds):
    """Mode follows the B1 scenario; all four scenarios ship alongside."""
    scenarios: dict[str, dict[str, CompositeCurve]] = {}
    for r in records:
        if r.A <= 0:
            continue
        d = Distribution(r.kind, r.A, r.B, r.C0, "PJ/y", "USD2008/MWh")
        scenarios.setdefault(r.variant, {})[r.region] = CompositeCurve.of(
            d, label=f"biomass/{r.variant}/{r.region}"
        )
    envelopes = _scaled_envelopes(scenarios["B1"], bounds, "biomass")
    global_scenarios = {
        scen: aggregate(list(curves.values()), f"biomass/{scen}")
        for scen, curves in scenarios.items()
    }
    return envelopes, global_scenarios


def _stock_band_gj(bands, units, resource, occurrence, cls) -> tuple[float, float]:
    try:
        band = bands[(resource, occurrence, cls)]
    except KeyError:
        raise RecipeError(
            f"no cost band for {resource}/{occurrence}/{cls}"
        ) from None
    return (
        units.cost_to_gj(band.lower, resource),
        units.cost_to_gj(band.upper, resource),
    )


def _build_stock(records, bands, units, resource, recipe) -> dict[str, Envelope]:
    by_key: dict[tuple[str, str], dict[str, float]] = {}
    for r in records:
        by_key.setdefault((r.occurrence, r.confidence), {}).setdefault(r.region, 0.0)
        by_key[(r.occurrence, r.confidence)][r.region] += r.amount

    regions = sorted({r.region for r in records})
    curves: dict[str, dict[str, list[Distribution]]] = {
        bound: {region: [] for region in regions} for bound in recipe
    }
    included_mass = {bound: {region: 0.0 for region in regions} for bound in recipe}

    for bound, entries in recipe.items():
        for entry in entries:
            if resource in ("hard_coal", "soft_coal"):
                cls, mult = entry
                occ = resource.split("_")[0]
                key = (occ, cls)
                band_cls = "reserves" if cls.startswith("reserves") else "resources"
            elif resource == "thorium":
                cls, mult = entry, 1.0
                key = ("thorium", cls)
                band_cls = cls
            else:
                occ, cls, mult = entry
                key = (occ, cls)
                band_cls = cls
            if key not in by_key:
                raise RecipeError(f"{resource}: recipe references absent class {key}")
            occurrence = key[0]
            c_lo, c_hi = _stock_band_gj(bands, units, resource, occurrence, band_cls)
            for region, amount in by_key[key].items():
                mass = amount * mult
                if mass <= 0.0:
                    continue
                a_ej = to_energy(mass, resource, units)
                curves[bound][region].append(
                    stock_from_band(a_ej, c_lo, c_hi, quantity_unit="EJ",
                                    cost_unit="USD2008/GJ")
                )
                included_mass[bound][region] += mass

    for region in regions:
        lo = included_mass["lower"][region]
        mid = included_mass["mode"][region]
        hi = included_mass["upper"][region]
        if not (lo <= mid + 1e-9 and mid <= hi + 1e-9):
            raise ValidationError(
                f"{resource}/{region}: recipe masses not nested ({lo}, {mid}, {hi})"
            )

    out: dict[str, Envelope] = {}
    per_bound_global = {}
    for bound in ("lower", "mode", "upper"):
        regional = {
            region: CompositeCurve(
                tuple(ds), f"{resource}/{region}/{bound}", "EJ", "USD2008/GJ"
            )
            for region, ds in curves[bound].items()
        }
        per_bound_global[bound] = aggregate(
            list(regional.values()), f"{resource}/{bound}"
        )
        curves[bound] = regional
    out[GLOBAL] = Envelope(
        per_bound_global["lower"], per_bound_global["mode"],
        per_bound_global["upper"], resource,
    )
    for region in regions:
        out[region] = Envelope(
            curves["lower"][region], curves["mode"][region], curves["upper"][region],
            f"{resource}/{region}",
        )
    return out


def _build_uranium(records, units, totals) -> tuple[dict[str, Envelope], dict]:
    """Fit cumulative curves to the aggregate cost-ceiling columns.

    Each bound's fit points are the printed world totals of its confidence
    classes at the four cost ceilings; the speculative mass with no cost
    assignment enters the upper curve's technical potential directly.
    Regional envelopes share the global curve shapes; all three bounds are
    split by one proxy weight (the region's share of identified mass below
    the top ceiling), which keeps regional envelopes ordered and summing
    exactly to the global curves.
    """
    by = {(r.confidence, r.occurrence): {} for r in records}
    for r in records:
        by[(r.confidence, r.occurrence)][r.region] = r.amount

    def printed(conf, ceiling):
        return totals.get(("uranium", f"{conf}_{ceiling}"), 0.0)

    ej = units.ej_per_native("uranium")
    fit_report = {}
    global_curves = {}
    for bound, classes in _URANIUM_CLASSES.items():
        points = [
            FitPoint(float(c), sum(printed(conf, c) for conf in classes))
            for c in _URANIUM_CEILINGS
        ]
        # relative weighting: the data spans an order of magnitude, and the
        # cheap-resource points matter as much as the saturated ones
        result = fit(DistributionKind.HIERARCHICAL, augment(points), relative=True,
                     quantity_unit="t", cost_unit="USD2008/kg")
        d = result.dist
        a_t = d.A
        if bound == "upper":
            a_t += totals[("uranium", "speculative_NA")]
        converted = Distribution(
            d.kind, a_t * ej, units.cost_to_gj(d.B, "uranium"),
            units.cost_to_gj(d.C0, "uranium"), "EJ", "USD2008/GJ",
        )
        global_curves[bound] = CompositeCurve.of(converted, label=f"uranium/{bound}")
        fit_report[bound] = {
            "A_t": a_t,
            "rmse_t": result.rmse,
            "residuals": result.per_point_residuals,
            "converged": result.converged,
        }
    # one proxy weight per region: identified (RAR + inferred) mass below
    # the top ceiling
    mass = {}
    for conf in ("rar", "inferred"):
        for region, amount in by.get((conf, "260"), {}).items():
            mass[region] = mass.get(region, 0.0) + amount
    total_mass = sum(mass.values())
    shares = {r: m / total_mass for r, m in mass.items() if m > 0.0}

    out = {
        GLOBAL: Envelope(
            global_curves["lower"], global_curves["mode"], global_curves["upper"],
            "uranium",
        )
    }
    regions = sorted({r.region for r in records})
    for region in regions:
        share = shares.get(region, 0.0)
        bounds = {
            bound: global_curves[bound].scaled(share, f"uranium/{region}/{bound}")
            for bound in ("lower", "mode", "upper")
        }
        out[region] = Envelope(
            bounds["lower"], bounds["mode"], bounds["upper"], f"uranium/{region}"
        )
    return out, fit_report


def build_resource(
    resource: str,
    data_dir: str | None = None,
    units: UnitTable | None = None,
) -> dict[str, Envelope]:
    """Envelopes for one resource, keyed by region plus the Global entry."""
    db = build_all(data_dir, units=units, only=(resource,))
    return db.resources[resource]


def build_all(
    data_dir: str | None = None,
    config: str | None = None,
    units: UnitTable | None = None,
    only: tuple[str, ...] | None = None,
) -> Database:
    """Load every table and build the full envelope database.

    Deterministic: identical inputs give an identical database.  The report
    carries the checksum totals, fit diagnostics, unit constants and any
    recorded data tensions.
    """
    data_dir = data_dir or default_data_dir()
    if units is None:
        units = UnitTable.from_config(config) if config else UnitTable()
    wanted = set(only) if only else set(RESOURCES)
    unknown = wanted - set(RESOURCES)
    if unknown:
        raise RescurveError(f"unknown resources: {sorted(unknown)}")

    def path(name):
        p = os.path.join(data_dir, name)
        if not os.path.exists(p):
            raise ParseError(f"missing data file: {p}")
        return p

    totals = load_printed_totals(path("printed_totals.csv"))
    bounds = load_envelope_bounds(path("envelope_bounds.csv"))
    bands = load_cost_bands(path("cost_bands.csv"))

    resources: dict[str, dict[str, Envelope]] = {}
    scenarios: dict[str, dict[str, CompositeCurve]] = {}
    failures: list[str] = []
    report: dict = {
        "unit_constants": {
            name: getattr(units, name) for name in UnitTable.__dataclass_fields__
        },
        "checksums": {f"{t}/{c}": v for (t, c), v in totals.items()},
        "notes": [],
    }

    renew = None
    if wanted & {"hydro", "wind", "solar", "ocean"}:
        renew = load_renewable_params(path("renewable_params.csv"), totals)

    builders = {
        "hydro": lambda: _build_simple_renewable(renew, "hydro", bounds["hydro"]),
        "wind": lambda: _build_simple_renewable(renew, "wind", bounds["wind"]),
        "solar": lambda: _build_simple_renewable(renew, "solar", bounds["solar"]),
        "ocean": lambda: _build_multi_renewable(
            [r for r in renew if r.resource in ("wave", "tidal")],
            "ocean", bounds["ocean"],
        ),
        "geothermal": lambda: _build_multi_renewable(
            load_geothermal_params(path("geothermal_params.csv"), totals),
            "geothermal", bounds["geothermal"],
        ),
        "oil": lambda: _build_stock(
            load_stock_table(path("oil.csv"), "oil", totals),
            bands, units, "oil", _OIL_RECIPE,
        ),
        "gas": lambda: _build_stock(
            load_stock_table(path("gas.csv"), "gas", totals),
            bands, units, "gas", _GAS_RECIPE,
        ),
        "thorium": lambda: _build_stock(
            load_stock_table(path("thorium.csv"), "thorium", totals),
            bands, units, "thorium", _THORIUM_RECIPE,
        ),
    }

    coal_records = None
    for resource in RESOURCES:
        if resource not in wanted:
            continue
        try:
            if resource == "biomass":
                env, scen = _build_biomass(
                    load_biomass_params(path("biomass_params.csv"), totals),
                    bounds["biomass"],
                )
                resources["biomass"] = env
                scenarios = {
                    name: {GLOBAL: curve} for name, curve in scen.items()
                }
            elif resource in ("hard_coal", "soft_coal"):
                if coal_records is None:
                    coal_records = load_stock_table(path("coal.csv"), "coal", totals)
                subset = [r for r in coal_records if r.resource == resource]
                resources[resource] = _build_stock(
                    subset, bands, units, resource, _COAL_RECIPE
                )
            elif resource == "uranium":
                env, fit_report = _build_uranium(
                    load_stock_table(path("uranium.csv"), "uranium", totals),
                    units, totals,
                )
                resources["uranium"] = env
                report["uranium_fits"] = fit_report
            else:
                resources[resource] = builders[resource]()
        except RescurveError as exc:
            failures.append(f"{resource}: {exc}")

    if failures:
        raise ValidationError("build failed for " + "; ".join(failures))

    if "thorium" in resources:
        identified = totals[("thorium", "identified")]
        stated = totals[("thorium", "rar")] + totals[("thorium", "inferred")]
        report["notes"].append(
            "thorium mode uses RAR+inferred mass "
            f"({stated} t); the identified column alone is {identified} t"
        )
    if "gas" in resources:
        report["notes"].append(
            "gas shale resources include an Unattributed region of 410401 Gm3 "
            "reconciling the regional rows with the column total"
        )

    report["totals_EJ_or_PJ_per_y"] = {
        res: {
            "lower": envs[GLOBAL].lower.potential,
            "mode": envs[GLOBAL].mode.potential,
            "upper": envs[GLOBAL].upper.potential,
        }
        for res, envs in resources.items()
    }
    return Database(resources, scenarios, report)
