import pytest

from rescurve.atlas import (
    ProxyWeights,
    RegionDef,
    RegionSet,
    disaggregate,
    reaggregate,
)
from rescurve.curveset import CompositeCurve
from rescurve.distcore import Distribution, DistributionKind, cumulative
from rescurve.errors import CoverageError, ParseError, WeightError

D = Distribution(DistributionKind.HIERARCHICAL, 1200.0, 8.0, 3.0)


def test_region_definitions_are_validated():
    with pytest.raises(ValueError):
        RegionDef("empty", ())
    with pytest.raises(ValueError):
        RegionSet(
            (
                RegionDef("a", ("FRA", "DEU")),
                RegionDef("b", ("DEU",)),
            )
        )


def test_region_set_from_csv(tmp_path):
    path = tmp_path / "regions.csv"
    path.write_text("region,country\nwest,FRA\nwest,ESP\neast,POL\n")
    rs = RegionSet.from_csv(path)
    assert [r.name for r in rs.regions] == ["west", "east"]
    assert rs.regions[0].members == ("FRA", "ESP")
    bad = tmp_path / "bad.csv"
    bad.write_text("name,code\nwest,FRA\n")
    with pytest.raises(ParseError):
        RegionSet.from_csv(bad)


def test_proxy_weights_must_be_non_negative(tmp_path):
    with pytest.raises(WeightError):
        ProxyWeights({"FRA": -1.0})
    path = tmp_path / "w.csv"
    path.write_text("country,weight\nFRA,2.5\nESP,0\n")
    w = ProxyWeights.from_csv(path)
    assert w.weights == {"FRA": 2.5, "ESP": 0.0}


def test_disaggregate_conserves_potential_exactly():
    weights = ProxyWeights({"FRA": 3.0, "ESP": 2.0, "POL": 0.0, "DEU": 7.0})
    parts = disaggregate(D, weights)
    assert "POL" not in parts  # zero weight contributes nothing
    assert sum(p.A for p in parts.values()) == D.A
    for p in parts.values():
        assert (p.B, p.C0, p.kind) == (D.B, D.C0, D.kind)
    assert parts["FRA"].A == pytest.approx(D.A * 3.0 / 12.0)


def test_disaggregate_rejects_zero_total_weight():
    with pytest.raises(WeightError):
        disaggregate(D, ProxyWeights({"FRA": 0.0}))


def test_reaggregate_is_the_horizontal_sum():
    weights = ProxyWeights({"FRA": 1.0, "ESP": 2.0, "POL": 3.0})
    parts = disaggregate(D, weights)
    rs = RegionSet((RegionDef("west", ("FRA", "ESP")), RegionDef("east", ("POL",))))
    merged = reaggregate(parts, rs)
    assert set(merged) == {"west", "east"}
    for c in (5.0, 10.0, 40.0):
        total = sum(curve.cumulative(c) for curve in merged.values())
        assert total == pytest.approx(cumulative(D, c), rel=1e-12)


def test_reaggregate_accepts_composite_inputs():
    curves = {"FRA": CompositeCurve.of(D, label="FRA")}
    out = reaggregate(curves, RegionSet((RegionDef("west", ("FRA",)),)))
    assert out["west"].potential == D.A


def test_reaggregate_reports_missing_countries():
    rs = RegionSet((RegionDef("west", ("FRA", "ESP", "PRT")),))
    with pytest.raises(CoverageError) as exc:
        reaggregate({"FRA": CompositeCurve.of(D)}, rs)
    assert exc.value.missing == ("ESP", "PRT")
