import json
import os

import pytest

from rescurve.errors import ParseError, RescurveError, UnitError, ValidationError
from rescurve.ingest import (
    GLOBAL,
    REGIONS,
    RESOURCES,
    CostBand,
    Database,
    UnitTable,
    build_all,
    build_resource,
    default_data_dir,
    load_cost_bands,
    load_envelope_bounds,
    load_printed_totals,
    load_renewable_params,
    load_stock_table,
    to_energy,
)


def test_unit_table_defaults_and_conversions():
    u = UnitTable()
    assert to_energy(1.0, "oil", u) == pytest.approx(0.041868)
    assert to_energy(1.0, "gas", u) == pytest.approx(0.0373)
    assert to_energy(1.0, "hard_coal", u) == pytest.approx(29.9e-3)  # Mt -> EJ
    assert to_energy(1e6, "uranium", u) == pytest.approx(159.0)  # t -> EJ
    assert u.cost_to_gj(159.0, "uranium") == pytest.approx(1.0)  # USD/kg -> USD/GJ
    assert u.cost_to_gj(6.12, "oil") == pytest.approx(1.0)  # USD/boe -> USD/GJ
    with pytest.raises(UnitError):
        u.ej_per_native("sunshine")
    with pytest.raises(UnitError):
        UnitTable(gas_EJ_per_Gm3=-1.0)


def test_unit_table_config_overrides(tmp_path):
    cfg = tmp_path / "units.cfg"
    cfg.write_text("# comment\nhard_coal_GJ_per_t = 25.0\n")
    u = UnitTable.from_config(cfg)
    assert u.hard_coal_GJ_per_t == 25.0
    assert u.oil_EJ_per_Mtoe == 0.041868  # untouched defaults remain
    bad = tmp_path / "bad.cfg"
    bad.write_text("no_such_constant=1\n")
    with pytest.raises(ParseError):
        UnitTable.from_config(bad)


def test_cost_band_must_be_ordered():
    with pytest.raises(ValidationError):
        CostBand(5.0, 5.0, "USD2008/GJ")


def test_loaders_reject_wrong_schema(tmp_path):
    path = tmp_path / "table.csv"
    path.write_text("foo,bar\n1,2\n")
    with pytest.raises(ParseError):
        load_printed_totals(path)
    with pytest.raises(ParseError):
        load_renewable_params(path)
    with pytest.raises(ParseError):
        load_stock_table(path, "oil")


def test_shipped_tables_load():
    data = default_data_dir()
    totals = load_printed_totals(os.path.join(data, "printed_totals.csv"))
    assert totals[("thorium", "rar")] == 829000.0
    bands = load_cost_bands(os.path.join(data, "cost_bands.csv"))
    assert all(b.lower < b.upper for b in bands.values())
    bounds = load_envelope_bounds(os.path.join(data, "envelope_bounds.csv"))
    assert set(bounds) == {"hydro", "wind", "solar", "biomass", "geothermal", "ocean"}


def test_corrupted_totals_are_caught(tmp_path):
    data = default_data_dir()
    rows = open(os.path.join(data, "oil.csv")).read().splitlines()
    header, first = rows[0], rows[1].split(",")
    first[3] = str(float(first[3]) + 1e6)  # blow one amount far past rounding
    (tmp_path / "oil.csv").write_text("\n".join([header, ",".join(first)] + rows[2:]))
    totals = load_printed_totals(os.path.join(data, "printed_totals.csv"))
    with pytest.raises(ValidationError):
        load_stock_table(tmp_path / "oil.csv", "oil", totals)


def test_build_covers_every_resource_and_region(db):
    assert set(db.resources) == set(RESOURCES)
    for resource in RESOURCES:
        envs = db.resources[resource]
        assert GLOBAL in envs
        assert set(REGIONS) <= set(envs)


def test_build_report_contents(db):
    assert db.report["unit_constants"]["oil_EJ_per_Mtoe"] == 0.041868
    assert "uranium_fits" in db.report
    assert db.report["uranium_fits"]["mode"]["converged"]
    totals = db.report["totals_EJ_or_PJ_per_y"]
    for resource in RESOURCES:
        t = totals[resource]
        assert t["lower"] <= t["mode"] <= t["upper"]


def test_biomass_scenarios_ship_alongside_the_mode(db):
    assert set(db.biomass_scenarios) == {"A1", "A2", "B1", "B2"}
    b1 = db.biomass_scenarios["B1"][GLOBAL]
    assert b1.potential == pytest.approx(db.envelope("biomass").mode.potential)


def test_regional_envelopes_aggregate_to_global(db):
    for resource in ("wind", "oil", "uranium"):
        envs = db.resources[resource]
        regional = sum(
            env.mode.potential for region, env in envs.items() if region != GLOBAL
        )
        assert regional == pytest.approx(envs[GLOBAL].mode.potential, rel=1e-9)


def test_build_is_deterministic(db):
    again = build_all()
    assert json.dumps(again.to_json_dict(), sort_keys=True) == json.dumps(
        db.to_json_dict(), sort_keys=True
    )


def test_database_save_load_round_trip(db, tmp_path):
    path = tmp_path / "db.json"
    db.save(path)
    back = Database.load(path)
    assert json.dumps(back.to_json_dict(), sort_keys=True) == json.dumps(
        db.to_json_dict(), sort_keys=True
    )
    env = back.envelope("gas")
    assert env.mode.potential == pytest.approx(db.envelope("gas").mode.potential)


def test_unknown_resource_or_region_is_reported(db):
    with pytest.raises(RescurveError):
        db.envelope("plutonium")
    with pytest.raises(RescurveError):
        db.envelope("oil", "Atlantis")
    with pytest.raises(RescurveError):
        build_all(only=("plutonium",))


def test_missing_data_file_is_named(tmp_path):
    with pytest.raises(ParseError) as exc:
        build_all(data_dir=tmp_path)
    assert "printed_totals.csv" in str(exc.value)


def test_build_resource_subset():
    envs = build_resource("hydro")
    assert GLOBAL in envs
    assert envs[GLOBAL].mode.potential == pytest.approx(66062.0)
