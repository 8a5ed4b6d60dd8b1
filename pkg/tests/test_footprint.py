import math

import numpy as np
import pytest

from tornado_damage.errors import AllCellsDropped, NoRegionCoverage, OutOfCoverage
from tornado_damage.footprint import (
    DEFAULT_HALF_WIDTH_M,
    DEFAULT_SIGMA_M,
    EARTH_RADIUS_M,
    gaussian_footprint,
    region_weight_masses,
    weighted_class_proportions,
    weighted_region_value,
)
from tornado_damage.geometry import RegionIndex
from tornado_damage.rasters import CategoricalRaster

from conftest import make_raster


def uniform_raster(code: int, n: int = 41, cellsize: float = 0.02) -> CategoricalRaster:
    return CategoricalRaster(
        values=np.full((n, n), code, dtype=np.int64),
        xll=-98.0 - n * cellsize / 2,
        yll=35.0 - n * cellsize / 2,
        cellsize=cellsize,
        nodata=-9999,
    )


def test_default_parameters_match_protocol():
    assert DEFAULT_SIGMA_M == 9054.0
    assert DEFAULT_HALF_WIDTH_M * 2 == 54_330.0


def test_weights_sum_to_one_and_peak_at_center():
    raster = make_raster(seed=5)
    fp = gaussian_footprint(35.0, -98.0, raster)
    assert fp.weights.sum() == pytest.approx(1.0, abs=1e-9)
    assert not fp.partial
    peak = np.unravel_index(np.argmax(fp.weights), fp.weights.shape)
    lats, lons = fp.cell_latlons(raster)
    assert abs(lats[peak[0]] - 35.0) <= raster.cellsize
    assert abs(lons[peak[1]] - (-98.0)) <= raster.cellsize


def test_weights_symmetric_under_rotation_when_centered():
    raster = uniform_raster(42)
    # center exactly on the middle cell center
    lat, lon = raster.cell_center(20, 20)
    fp = gaussian_footprint(lat, lon, raster)
    w = fp.weights
    np.testing.assert_allclose(w, w[::-1, :], atol=1e-12)  # north-south flip
    np.testing.assert_allclose(w, w[:, ::-1], atol=1e-9)  # east-west flip
    assert np.argmax(w) == np.ravel_multi_index((w.shape[0] // 2, w.shape[1] // 2), w.shape)


def test_weights_radially_nonincreasing_from_center():
    raster = uniform_raster(42, n=41)
    lat, lon = raster.cell_center(20, 20)
    fp = gaussian_footprint(lat, lon, raster)
    w = fp.weights
    ci, cj = w.shape[0] // 2, w.shape[1] // 2
    row = w[ci, cj:]
    col = w[ci:, cj]
    assert np.all(np.diff(row) <= 0)
    assert np.all(np.diff(col) <= 0)


def test_weights_depend_only_on_geometry():
    r1 = make_raster(seed=5)
    r2 = make_raster(seed=99)  # same grid, permuted values
    fp1 = gaussian_footprint(35.0, -98.0, r1)
    fp2 = gaussian_footprint(35.0, -98.0, r2)
    np.testing.assert_array_equal(fp1.weights, fp2.weights)


def test_out_of_coverage_and_partial_flag():
    raster = uniform_raster(42)
    with pytest.raises(OutOfCoverage):
        gaussian_footprint(10.0, -60.0, raster)
    edge = gaussian_footprint(raster.yll + 0.01, raster.xll + 0.01, raster)
    assert edge.partial
    assert edge.weights.sum() == pytest.approx(1.0, abs=1e-9)


def test_window_size_in_meters():
    raster = uniform_raster(42, n=81, cellsize=0.01)
    fp = gaussian_footprint(35.0, -98.0, raster)
    lats, _ = fp.cell_latlons(raster)
    north_extent = (lats.max() - lats.min()) * math.pi / 180.0 * EARTH_RADIUS_M
    assert north_extent <= 2 * DEFAULT_HALF_WIDTH_M
    assert north_extent >= 2 * DEFAULT_HALF_WIDTH_M - 2 * 0.01 * 111_320


def test_uniform_class_proportion_is_one():
    raster = uniform_raster(42)
    fp = gaussian_footprint(35.0, -98.0, raster)
    proportions, dropped = weighted_class_proportions(raster, fp)
    assert proportions == {42: pytest.approx(1.0)}
    assert dropped == {}


def test_half_and_half_split():
    raster = uniform_raster(42, n=40)
    raster.values[:, : raster.ncols // 2] = 41
    raster.values[:, raster.ncols // 2:] = 82
    # center on the cell edge separating the two halves
    lat = 35.0
    lon = raster.xll + (raster.ncols // 2) * raster.cellsize
    fp = gaussian_footprint(lat, lon, raster)
    proportions, _ = weighted_class_proportions(raster, fp)
    assert proportions[41] == pytest.approx(0.5, abs=1e-9)
    assert proportions[82] == pytest.approx(0.5, abs=1e-9)


def test_proportions_match_per_cell_oracle():
    raster = make_raster(seed=13, n=30, cellsize=0.03)
    lat, lon = 35.05, -97.95
    fp = gaussian_footprint(lat, lon, raster)
    proportions, dropped = weighted_class_proportions(raster, fp)

    # oracle: direct per-cell summation
    window = fp.window_values(raster)
    masses: dict[int, float] = {}
    for i in range(window.shape[0]):
        for j in range(window.shape[1]):
            code = int(window[i, j])
            masses[code] = masses.get(code, 0.0) + float(fp.weights[i, j])
    kept = {c: m for c, m in masses.items() if c not in (0, 12, raster.nodata)}
    total = sum(kept.values())
    for code, mass in kept.items():
        assert proportions[code] == pytest.approx(mass / total, abs=1e-12)
    assert sum(proportions.values()) == pytest.approx(1.0, abs=1e-9)


def test_excluded_classes_dropped_and_renormalized():
    raster = uniform_raster(42)
    raster.values[::2, :] = 12  # half the rows are ice/snow
    fp = gaussian_footprint(35.0, -98.0, raster)
    proportions, dropped = weighted_class_proportions(raster, fp)
    assert set(proportions) == {42}
    assert proportions[42] == pytest.approx(1.0)
    assert 12 in dropped and dropped[12] > 0


def test_all_cells_dropped():
    raster = uniform_raster(12)
    fp = gaussian_footprint(35.0, -98.0, raster)
    with pytest.raises(AllCellsDropped):
        weighted_class_proportions(raster, fp)


def region_index_two_halves(split_lon: float) -> RegionIndex:
    return RegionIndex.from_rings({
        "west": [[(-180.0, -90.0), (split_lon, -90.0), (split_lon, 90.0), (-180.0, 90.0)]],
        "east": [[(split_lon, -90.0), (180.0, -90.0), (180.0, 90.0), (split_lon, 90.0)]],
    })


def test_single_region_returns_value():
    raster = uniform_raster(42)
    fp = gaussian_footprint(35.0, -98.0, raster)
    regions = RegionIndex.from_rings(
        {"all": [[(-180.0, -90.0), (180.0, -90.0), (180.0, 90.0), (-180.0, 90.0)]]}
    )
    masses = region_weight_masses(fp, raster, regions)
    assert masses["all"] == pytest.approx(1.0, abs=1e-9)
    assert weighted_region_value({"all": 7.5}, masses) == pytest.approx(7.5)


def test_two_regions_split_mass_evenly():
    raster = uniform_raster(42, n=40)
    lat = 35.0
    lon = raster.xll + (raster.ncols // 2) * raster.cellsize  # on a cell edge
    fp = gaussian_footprint(lat, lon, raster)
    regions = region_index_two_halves(lon)
    masses = region_weight_masses(fp, raster, regions)
    assert masses["west"] + masses["east"] == pytest.approx(1.0, abs=1e-9)
    assert masses["west"] == pytest.approx(0.5, abs=1e-9)
    assert weighted_region_value({"west": 10.0, "east": 30.0}, masses) == pytest.approx(20.0, abs=1e-7)


def test_three_region_layout_matches_cell_oracle():
    raster = uniform_raster(31, cellsize=0.02)
    fp = gaussian_footprint(35.0, -98.0, raster)
    regions = RegionIndex.from_rings({
        "a": [[(-98.5, 34.5), (-98.05, 34.5), (-98.05, 35.5), (-98.5, 35.5)]],
        "b": [[(-98.05, 34.5), (-97.95, 34.5), (-97.95, 35.5), (-98.05, 35.5)]],
        "c": [[(-97.95, 34.5), (-97.5, 34.5), (-97.5, 35.5), (-97.95, 35.5)]],
    })
    values = {"a": 1.0, "b": 5.0, "c": 9.0}
    masses = region_weight_masses(fp, raster, regions)
    got = weighted_region_value(values, masses)

    # oracle: enumerate cells, accumulate weighted values directly
    lats, lons = fp.cell_latlons(raster)
    num = den = 0.0
    for i, la in enumerate(lats):
        for j, lo in enumerate(lons):
            rid = regions.assign(float(la), float(lo))
            if rid is not None:
                num += values[rid] * float(fp.weights[i, j])
                den += float(fp.weights[i, j])
    assert got == pytest.approx(num / den, abs=1e-12)


def test_no_region_coverage():
    raster = uniform_raster(41)
    fp = gaussian_footprint(35.0, -98.0, raster)
    regions = RegionIndex.from_rings(
        {"far": [[(50.0, 50.0), (51.0, 50.0), (51.0, 51.0), (50.0, 51.0)]]}
    )
    masses = region_weight_masses(fp, raster, regions)
    with pytest.raises(NoRegionCoverage):
        weighted_region_value({"far": 1.0}, masses)


def test_region_with_missing_value_excluded():
    raster = uniform_raster(42, n=40)
    lon = raster.xll + (raster.ncols // 2) * raster.cellsize
    fp = gaussian_footprint(35.0, lon, raster)
    masses = region_weight_masses(fp, raster, region_index_two_halves(lon))
    # only the west region carries a value: its value comes back exactly
    assert weighted_region_value({"west": 4.0}, masses) == pytest.approx(4.0)
