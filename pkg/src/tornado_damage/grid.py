"""Prediction grid, city points, and monthly what-if scenarios.

The grid is a rectangle of points spaced 0.75 degrees over the contiguous-US
bounding box (longitude -125..-66, latitude 23..50), masked with an even-odd
point-in-polygon test against a boundary polygon. Scenario rows impute the
training mean for storm-characteristic variables (0 on the transformed
scale); time-of-day spline features are evaluated at the training-mean
minutes-since-midnight so the basis values stay a partition of unity, and
day-of-year features come from the scenario date (the 15th of the month).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from datetime import date
from pathlib import Path

import numpy as np

from .dataset import REGION_COLUMNS, REGION_YEAR_RANGE, ColumnDescriptor
from .derive import PipelineConfig, landcover_row, location_derived_features
from .errors import SchemaMismatch, TornadoDamageError
from .footprint import (
    gaussian_footprint,
    region_weight_masses,
    weighted_class_proportions,
    weighted_region_value,
)
from .geometry import RegionIndex, Ring, point_in_rings
from .rasters import CategoricalRaster, raster_for_year
from .splines import bspline_basis, day_of_year_spec, time_of_day_spec
from .transforms import apply_transform
from .zero_inflated import DamagePrediction, ZeroInflatedModel, predict_batch

GRID_SPACING_DEG = 0.75
GRID_LON_BOUNDS = (-125.0, -66.0)
GRID_LAT_BOUNDS = (23.0, 50.0)


def _axis_points(lo: float, hi: float, step: float) -> np.ndarray:
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


@dataclass
class PredictionGrid:
    lats: np.ndarray  # (n,) per point
    lons: np.ndarray
    mask: np.ndarray  # True = inside boundary
    spacing: float = GRID_SPACING_DEG

    @property
    def n_points(self) -> int:
        return self.lats.size

    def unmasked(self) -> list[tuple[float, float]]:
        return [
            (float(lat), float(lon))
            for lat, lon, keep in zip(self.lats, self.lons, self.mask)
            if keep
        ]


def build_grid(
    boundary: list[Ring],
    spacing: float = GRID_SPACING_DEG,
    lon_bounds: tuple[float, float] = GRID_LON_BOUNDS,
    lat_bounds: tuple[float, float] = GRID_LAT_BOUNDS,
) -> PredictionGrid:
    """Enumerate the full rectangle (longitude outer, latitude inner) and
    flag each point by the even-odd boundary test."""
    lon_axis = _axis_points(lon_bounds[0], lon_bounds[1], spacing)
    lat_axis = _axis_points(lat_bounds[0], lat_bounds[1], spacing)
    lats, lons, mask = [], [], []
    for lon in lon_axis:
        for lat in lat_axis:
            lats.append(float(lat))
            lons.append(float(lon))
            mask.append(point_in_rings(float(lon), float(lat), boundary))
    return PredictionGrid(
        lats=np.asarray(lats), lons=np.asarray(lons), mask=np.asarray(mask), spacing=spacing
    )


def city_points(path: str | Path, population_floor: float = 100_000.0) -> list[tuple[str, float, float]]:
    """Cities with population strictly exceeding the floor, in file order.

    CSV columns: name, lat, lon, population.
    """
    path = Path(path)
    out: list[tuple[str, float, float]] = []
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"name", "lat", "lon", "population"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise SchemaMismatch(f"{path}: expected columns {sorted(required)}, got {reader.fieldnames}")
        for row in reader:
            if float(row["population"]) > population_floor:
                out.append((row["name"], float(row["lat"]), float(row["lon"])))
    return out


@dataclass
class ScenarioPoint:
    name: str
    lat: float
    lon: float
    year: int
    month: int
    features: np.ndarray  # transformed, roster order


@dataclass
class FailedPoint:
    name: str
    lat: float
    lon: float
    reason: str


def scenario_features(
    lat: float,
    lon: float,
    year: int,
    month: int,
    columns: list[ColumnDescriptor],
    aux_means: dict[str, float],
    rasters: dict[int, CategoricalRaster],
    region_values: dict[int, dict[str, dict[str, float]]],
    regions: RegionIndex,
    config: PipelineConfig,
) -> np.ndarray:
    """Transformed feature vector for one scenario point on the 15th of the
    month. Raises extraction errors for uncovered points."""
    raster = raster_for_year(rasters, year)
    fp = gaussian_footprint(lat, lon, raster)
    proportions, _ = weighted_class_proportions(raster, fp)
    masses = region_weight_masses(fp, raster, regions)
    region_year = min(max(year, REGION_YEAR_RANGE[0]), REGION_YEAR_RANGE[1])
    per_year = region_values.get(region_year, {})
    extracted = {
        col: weighted_region_value(per_year.get(col, {}), masses) for col in REGION_COLUMNS
    }
    loc, missing = location_derived_features(proportions, extracted, config)
    if missing:
        name, reason = missing[0]
        raise TornadoDamageError(f"missing derived feature {name}: {reason}")
    natural: dict[str, float] = dict(loc)
    natural.update(landcover_row(proportions))
    natural.update(extracted)
    natural["begin_lat"] = lat
    natural["begin_lon"] = lon

    doy = float(date(year, month, 15).timetuple().tm_yday)
    doy_basis = bspline_basis(doy, day_of_year_spec())
    time_basis = bspline_basis(aux_means["begin_time_minutes"], time_of_day_spec())

    vector = np.empty(len(columns))
    for j, col in enumerate(columns):
        if col.spline_group == "day_of_year":
            index = int(col.name.rsplit("_", 1)[1])
            vector[j] = apply_transform(col.transform, float(doy_basis[index]))
        elif col.spline_group == "begin_time":
            index = int(col.name.rsplit("_", 1)[1])
            vector[j] = apply_transform(col.transform, float(time_basis[index]))
        elif col.beforehand:
            vector[j] = apply_transform(col.transform, natural[col.name])
        elif col.transform is not None:
            vector[j] = 0.0  # storm-characteristic (and mixture) at the training mean
        else:
            vector[j] = col.natural_mean  # untransformed indicator
    return vector


def make_scenarios(
    points: list[tuple[str, float, float]],
    year: int,
    month: int,
    columns: list[ColumnDescriptor],
    aux_means: dict[str, float],
    rasters: dict[int, CategoricalRaster],
    region_values: dict[int, dict[str, dict[str, float]]],
    regions: RegionIndex,
    config: PipelineConfig,
) -> tuple[list[ScenarioPoint], list[FailedPoint]]:
    if not 1 <= month <= 12:
        raise ValueError(f"month must be 1..12, got {month}")
    scenarios: list[ScenarioPoint] = []
    failed: list[FailedPoint] = []
    for name, lat, lon in points:
        try:
            features = scenario_features(
                lat, lon, year, month, columns, aux_means, rasters, region_values, regions, config
            )
        except TornadoDamageError as exc:
            failed.append(FailedPoint(name, lat, lon, str(exc)))
            continue
        scenarios.append(ScenarioPoint(name, lat, lon, year, month, features))
    return scenarios, failed


@dataclass
class PredictionRow:
    name: str
    lat: float
    lon: float
    year: int
    month: int
    prediction: DamagePrediction


def predict_points(model: ZeroInflatedModel, scenarios: list[ScenarioPoint]) -> list[PredictionRow]:
    """Batch Eval inference, output sorted by (lat, lon, month)."""
    if not scenarios:
        return []
    matrix = np.stack([s.features for s in scenarios])
    predictions = predict_batch(model, matrix)
    rows = [
        PredictionRow(s.name, s.lat, s.lon, s.year, s.month, p)
        for s, p in zip(scenarios, predictions)
    ]
    rows.sort(key=lambda r: (r.lat, r.lon, r.month))
    return rows


def write_predictions_csv(rows: list[PredictionRow], path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["name", "lat", "lon", "year", "month",
                         "p_damage", "conditional_usd", "expected_usd"])
        for r in rows:
            writer.writerow([
                r.name, repr(r.lat), repr(r.lon), r.year, r.month,
                repr(r.prediction.p_damage), repr(r.prediction.conditional_usd),
                repr(r.prediction.expected_usd),
            ])


def write_predictions_geojsonl(rows: list[PredictionRow], path: str | Path) -> None:
    """One point feature per line (newline-delimited geo features)."""
    with Path(path).open("w") as fh:
        for r in rows:
            feature = {
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [r.lon, r.lat]},
                "properties": {
                    "name": r.name,
                    "year": r.year,
                    "month": r.month,
                    "p_damage": r.prediction.p_damage,
                    "conditional_usd": r.prediction.conditional_usd,
                    "expected_usd": r.prediction.expected_usd,
                },
            }
            fh.write(json.dumps(feature) + "\n")
