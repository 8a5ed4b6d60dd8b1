import json
from datetime import date

import numpy as np
import pytest

from tornado_damage.dataset import Source
from tornado_damage.errors import SchemaMismatch
from tornado_damage.geometry import point_in_rings
from tornado_damage.grid import (
    GRID_LAT_BOUNDS,
    GRID_LON_BOUNDS,
    GRID_SPACING_DEG,
    PredictionRow,
    build_grid,
    city_points,
    make_scenarios,
    predict_points,
    scenario_features,
    write_predictions_csv,
    write_predictions_geojsonl,
)
from tornado_damage.splines import bspline_basis, day_of_year_spec, time_of_day_spec
from tornado_damage.transforms import apply_transform

WHOLE_RECTANGLE = [[(-126.0, 22.0), (-65.0, 22.0), (-65.0, 51.0), (-126.0, 51.0)]]


def test_full_rectangle_point_count():
    grid = build_grid(WHOLE_RECTANGLE)
    assert grid.n_points == 79 * 37 == 2923
    assert np.all(grid.mask)
    assert len(grid.unmasked()) == 2923


def test_grid_axes_are_exact_multiples():
    grid = build_grid(WHOLE_RECTANGLE)
    lons = np.unique(grid.lons)
    lats = np.unique(grid.lats)
    assert lons[0] == GRID_LON_BOUNDS[0] and lats[0] == GRID_LAT_BOUNDS[0]
    assert lats[-1] == 50.0  # 23 + 36 * 0.75 lands exactly on the bound
    assert lons[-1] == -66.5  # last multiple of 0.75 not exceeding -66
    np.testing.assert_array_equal(np.diff(lons), GRID_SPACING_DEG)
    np.testing.assert_array_equal(np.diff(lats), GRID_SPACING_DEG)


def test_masked_points_fail_the_documented_rule():
    hexagon = [[(-110.0, 30.0), (-90.0, 25.0), (-70.0, 30.0),
                (-70.0, 45.0), (-90.0, 49.0), (-110.0, 45.0)]]
    grid = build_grid(hexagon)
    assert 0 < int(grid.mask.sum()) < grid.n_points
    for lat, lon, inside in zip(grid.lats, grid.lons, grid.mask):
        assert point_in_rings(float(lon), float(lat), hexagon) == bool(inside)


def test_grid_independent_of_ring_point_order():
    rolled = [WHOLE_RECTANGLE[0][2:] + WHOLE_RECTANGLE[0][:2]]
    a = build_grid(WHOLE_RECTANGLE)
    b = build_grid(rolled)
    np.testing.assert_array_equal(a.mask, b.mask)
    np.testing.assert_array_equal(a.lats, b.lats)


def test_city_points_strict_population_filter(tmp_path):
    path = tmp_path / "cities.csv"
    path.write_text(
        "name,lat,lon,population\n"
        "Exactly,35.0,-98.0,100000\n"
        "Above,36.0,-97.0,100001\n"
        "Below,34.0,-99.0,99999\n"
    )
    cities = city_points(path)
    assert cities == [("Above", 36.0, -97.0)]


def test_city_points_empty_and_schema(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("name,lat,lon,population\n")
    assert city_points(empty) == []
    bad = tmp_path / "bad.csv"
    bad.write_text("name,latitude\nX,1\n")
    with pytest.raises(SchemaMismatch):
        city_points(bad)


def test_city_filter_at_archive_scale(tmp_path):
    path = tmp_path / "cities.csv"
    with path.open("w") as fh:
        fh.write("name,lat,lon,population\n")
        for i in range(261):
            fh.write(f"big{i},35.0,-98.0,{100001 + i}\n")
        for i in range(40):
            fh.write(f"small{i},35.0,-98.0,{99000 - i}\n")
    assert len(city_points(path)) == 261


@pytest.fixture(scope="module")
def scenario_world(world, pipeline_config, assembled):
    table = assembled["table"]
    return {
        "columns": table.columns,
        "aux_means": table.aux_means,
        "rasters": world["rasters"],
        "region_values": world["region_values"],
        "regions": world["regions"],
        "config": pipeline_config,
    }


def test_scenario_storm_features_at_training_mean(scenario_world):
    sw = scenario_world
    vector = scenario_features(35.0, -98.0, 2019, 7, sw["columns"], sw["aux_means"],
                               sw["rasters"], sw["region_values"], sw["regions"], sw["config"])
    for j, col in enumerate(sw["columns"]):
        storm_scalar = (
            col.source in (Source.STORM, Source.STORM_ACS)
            and not col.beforehand
            and col.spline_group is None
        )
        if storm_scalar and col.transform is not None:
            assert vector[j] == 0.0, col.name
        if col.name == "multi_vortex":
            assert vector[j] == pytest.approx(col.natural_mean)


def test_scenario_dates_drive_only_date_features(scenario_world):
    sw = scenario_world
    args = (sw["rasters"], sw["region_values"], sw["regions"], sw["config"])
    march = scenario_features(35.0, -98.0, 2019, 3, sw["columns"], sw["aux_means"], *args)
    july = scenario_features(35.0, -98.0, 2019, 7, sw["columns"], sw["aux_means"], *args)
    for j, col in enumerate(sw["columns"]):
        if col.spline_group == "day_of_year":
            continue
        assert march[j] == july[j], col.name
    assert any(march[j] != july[j] for j, c in enumerate(sw["columns"])
               if c.spline_group == "day_of_year")


def test_scenario_july_15_day_of_year(scenario_world):
    sw = scenario_world
    assert date(2019, 7, 15).timetuple().tm_yday == 196
    vector = scenario_features(35.0, -98.0, 2019, 7, sw["columns"], sw["aux_means"],
                               *(sw["rasters"], sw["region_values"], sw["regions"], sw["config"]))
    basis = bspline_basis(196.0, day_of_year_spec())
    for j, col in enumerate(sw["columns"]):
        if col.spline_group == "day_of_year":
            k = int(col.name.rsplit("_", 1)[1])
            assert vector[j] == pytest.approx(apply_transform(col.transform, float(basis[k])))


def test_scenario_time_features_use_mean_minutes(scenario_world):
    sw = scenario_world
    vector = scenario_features(35.0, -98.0, 2019, 7, sw["columns"], sw["aux_means"],
                               *(sw["rasters"], sw["region_values"], sw["regions"], sw["config"]))
    basis = bspline_basis(sw["aux_means"]["begin_time_minutes"], time_of_day_spec())
    assert basis.sum() == pytest.approx(1.0)
    for j, col in enumerate(sw["columns"]):
        if col.spline_group == "begin_time":
            k = int(col.name.rsplit("_", 1)[1])
            assert vector[j] == pytest.approx(apply_transform(col.transform, float(basis[k])))


def test_make_scenarios_flags_failed_points(scenario_world):
    sw = scenario_world
    points = [("ok", 35.0, -98.0), ("off-raster", 45.0, -120.0)]
    scenarios, failed = make_scenarios(points, 2019, 5, sw["columns"], sw["aux_means"],
                                       sw["rasters"], sw["region_values"], sw["regions"], sw["config"])
    assert [s.name for s in scenarios] == ["ok"]
    assert [f.name for f in failed] == ["off-raster"]
    assert failed[0].reason
    with pytest.raises(ValueError):
        make_scenarios(points, 2019, 13, sw["columns"], sw["aux_means"],
                       sw["rasters"], sw["region_values"], sw["regions"], sw["config"])


def test_predict_points_sorted_and_pure(scenario_world, assembled):
    from tornado_damage.nn import NetworkParams, NetworkSpec, OutputActivation
    from tornado_damage.zero_inflated import ZeroInflatedModel

    sw = scenario_world
    table = assembled["table"]
    n_features = len(table.columns)
    model = ZeroInflatedModel(
        classifier_spec=NetworkSpec(n_inputs=n_features, hidden_widths=(),
                                    output_activation=OutputActivation.LOGISTIC),
        classifier_params=NetworkParams(weights=[np.full((1, n_features), 0.01)], biases=[np.zeros(1)]),
        conditional_spec=NetworkSpec(n_inputs=n_features, hidden_widths=()),
        conditional_params=NetworkParams(weights=[np.full((1, n_features), 0.02)], biases=[np.zeros(1)]),
        outcome_transform=table.outcome_transform,
        feature_names=table.column_names(),
    )
    points = [("b", 35.2, -98.0), ("a", 34.8, -98.2), ("a-dup", 34.8, -98.2)]
    scenarios, failed = make_scenarios(points, 2019, 6, sw["columns"], sw["aux_means"],
                                       sw["rasters"], sw["region_values"], sw["regions"], sw["config"])
    assert not failed
    rows = predict_points(model, scenarios)
    assert [(r.lat, r.lon) for r in rows] == sorted((r.lat, r.lon) for r in rows)
    dup = [r for r in rows if r.lat == 34.8]
    assert len(dup) == 2
    assert dup[0].prediction.p_damage == dup[1].prediction.p_damage
    assert dup[0].prediction.expected_usd == dup[1].prediction.expected_usd
    for r in rows:
        p = r.prediction
        assert p.expected_usd == pytest.approx(p.p_damage * p.conditional_usd, rel=1e-12)
        assert p.conditional_usd >= 0
        assert p.damage_flag == (p.p_damage >= 0.5)


def test_prediction_exports(tmp_path):
    from tornado_damage.zero_inflated import DamagePrediction

    rows = [
        PredictionRow("x", 35.0, -98.0, 2019, 4,
                      DamagePrediction(0.5, 0.1, 100.0, 50.0, True)),
    ]
    csv_path = tmp_path / "grid.csv"
    write_predictions_csv(rows, csv_path)
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "name,lat,lon,year,month,p_damage,conditional_usd,expected_usd"
    assert lines[1].startswith("x,35.0,-98.0,2019,4,0.5,100.0,50.0")

    geo_path = tmp_path / "grid.geojsonl"
    write_predictions_geojsonl(rows, geo_path)
    feature = json.loads(geo_path.read_text().splitlines()[0])
    assert feature["type"] == "Feature"
    assert feature["geometry"]["coordinates"] == [-98.0, 35.0]
    assert feature["properties"]["p_damage"] == 0.5
    assert feature["properties"]["month"] == 4
