"""Shared synthetic fixtures: a small geographic world (raster, counties,
regional tables, CPI) and event generators used across the suite."""

from __future__ import annotations

import csv
import math
from datetime import datetime, timedelta
from pathlib import Path

import numpy as np
import pytest

from tornado_damage.derive import load_pipeline_config
from tornado_damage.events import TornadoEvent
from tornado_damage.geometry import RegionIndex
from tornado_damage.inflation import CpiSeries
from tornado_damage.rasters import CategoricalRaster

LANDCOVER_CODES = [11, 21, 22, 23, 24, 31, 41, 42, 43, 52, 71, 81, 82, 90, 95]

# Raw regional schema: the 64 value columns expected by the default recipes.
RAW_REGION_COLUMNS = (
    [
        "median_household_income", "population", "median_year_built", "housing_units",
        "lower_quartile_home_value", "median_home_value", "upper_quartile_home_value",
        "gini_index", "mobile_homes", "white", "male", "under_18", "poverty_12mo",
        "male_hs", "female_hs", "male_assoc", "female_assoc", "male_bach", "female_bach",
        "male_masters", "male_professional", "male_doctorate",
        "female_masters", "female_professional", "female_doctorate",
    ]
    + [f"{sex}_{band}" for sex in ("male", "female")
       for band in ("65_66", "67_69", "70_74", "75_79", "80_84", "85_over")]
    + [f"{marital}_{sex}_{status}"
       for marital in ("never_married", "married", "separated", "widowed", "divorced")
       for sex in ("male", "female")
       for status in ("unemployed", "not_in_lf")]
    + ["commute_30_34", "commute_35_39", "commute_40_44",
       "commute_45_59", "commute_60_89", "commute_90_plus",
       "depart_0000_0459"]
)

WORLD_CENTER = (35.0, -98.0)  # lat, lon


def make_raster(seed: int = 0, n: int = 60, cellsize: float = 0.025, vintage: int | None = None) -> CategoricalRaster:
    rng = np.random.default_rng(seed)
    values = rng.choice(LANDCOVER_CODES, size=(n, n))
    extent = n * cellsize
    return CategoricalRaster(
        values=values,
        xll=WORLD_CENTER[1] - extent / 2,
        yll=WORLD_CENTER[0] - extent / 2,
        cellsize=cellsize,
        nodata=-9999,
        vintage=vintage,
    )


def make_regions() -> RegionIndex:
    """Four square counties tiling lon [-98.5, -97.5] x lat [34.5, 35.5]."""
    rings = {}
    for i, lat0 in enumerate((34.5, 35.0)):
        for j, lon0 in enumerate((-98.5, -98.0)):
            ring = [
                (lon0, lat0), (lon0 + 0.5, lat0),
                (lon0 + 0.5, lat0 + 0.5), (lon0, lat0 + 0.5),
            ]
            rings[f"c{i}{j}"] = [ring]
    return RegionIndex.from_rings(rings)


def region_raw_row(region_id: str, year: int) -> dict[str, float]:
    """Deterministic plausible raw column values for one county-year."""
    stable = sum(ord(ch) for ch in region_id)
    base = 1000 + 137 * (stable % 7) + 3 * (year - 2010)
    tilt = (stable % 9) / 100.0  # county-specific shift so ratios differ
    row = {}
    for k, col in enumerate(RAW_REGION_COLUMNS):
        row[col] = float(base + 11 * k + 7 * (k % 3) * (stable % 4))
    row["population"] = 50_000 + base * 3
    row["under_18"] = row["population"] * (0.20 + tilt)
    row["white"] = row["population"] * (0.65 + tilt)
    row["male"] = row["population"] * (0.47 + tilt)
    row["poverty_12mo"] = row["population"] * (0.10 + tilt)
    row["housing_units"] = row["population"] * (0.38 + tilt)
    row["mobile_homes"] = row["housing_units"] * (0.06 + tilt)
    row["median_household_income"] = 48_000 + base
    row["median_year_built"] = 1975 + (year - 2010) * 0.3
    row["lower_quartile_home_value"] = 90_000 + base * 2
    row["median_home_value"] = 140_000 + base * 3
    row["upper_quartile_home_value"] = 210_000 + base * 4
    row["gini_index"] = 0.41 + 0.001 * (stable % 5)
    return row


def make_region_values(config) -> dict[int, dict[str, dict[str, float]]]:
    """Aggregated {year: {column: {region: value}}} for 2010..2017."""
    from tornado_damage.derive import aggregate_region_row

    out: dict[int, dict[str, dict[str, float]]] = {}
    for year in range(2010, 2018):
        per_year: dict[str, dict[str, float]] = {}
        for rid in ("c00", "c01", "c10", "c11"):
            aggregated = aggregate_region_row(region_raw_row(rid, year), config.aggregation_recipes)
            for col, value in aggregated.items():
                per_year.setdefault(col, {})[rid] = value
        out[year] = per_year
    return out


def make_cpi() -> CpiSeries:
    values = {}
    for year in range(1996, 2021):
        for month in range(1, 13):
            values[(year, month)] = 150.0 + (year - 1996) * 4.0 + month * 0.2
    return CpiSeries(values=values)


def make_events(n: int = 40, seed: int = 7) -> list[TornadoEvent]:
    """Synthetic events. The first 16 get evenly spread days-of-year and
    times-of-day so every spline basis column has support even at small n."""
    rng = np.random.default_rng(seed)
    spread = min(n, 16)
    events = []
    for i in range(n):
        lat = float(rng.uniform(34.6, 35.4))
        lon = float(rng.uniform(-98.4, -97.6))
        year = int(rng.integers(1997, 2019))
        if i < spread:
            doy = 3 + i * (358 / max(spread - 1, 1))
            minutes = 20 + i * (1400 / max(spread - 1, 1))
        else:
            doy = float(rng.uniform(1, 365))
            minutes = float(rng.uniform(0, 1439))
        day = datetime(year, 1, 1) + timedelta(days=int(doy) - 1)
        start = day.replace(hour=int(minutes // 60), minute=int(minutes % 60))
        damaged = rng.random() > 0.35
        damage = float(np.expm1(rng.normal(10.0, 1.5))) if damaged else 0.0
        narrative = "a multi-vortex tornado" if rng.random() < 0.1 else "a tornado touched down"
        events.append(TornadoEvent(
            event_id=f"ev{i:04d}",
            begin_lat=lat,
            begin_lon=lon,
            begin_time=start,
            duration_s=float(rng.uniform(30, 3600)),
            length=float(rng.uniform(0.05, 30.0)),
            width=float(rng.uniform(5, 1500)),
            damage_usd=damage,
            narrative=narrative,
        ))
    return events


@pytest.fixture(scope="session")
def pipeline_config():
    return load_pipeline_config()


@pytest.fixture(scope="session")
def world(pipeline_config):
    """Raster vintages, regions, regional values, CPI."""
    return {
        "rasters": {
            2001: make_raster(seed=1, vintage=2001),
            2006: make_raster(seed=2, vintage=2006),
            2011: make_raster(seed=3, vintage=2011),
        },
        "regions": make_regions(),
        "region_values": make_region_values(pipeline_config),
        "cpi": make_cpi(),
    }


@pytest.fixture(scope="session")
def assembled(world, pipeline_config):
    from tornado_damage.dataset import assemble_feature_table

    events = make_events(n=120, seed=11)
    table, drops = assemble_feature_table(
        events,
        world["rasters"],
        world["region_values"],
        world["regions"],
        world["cpi"],
        pipeline_config,
    )
    return {"events": events, "table": table, "drops": drops}


def make_zi_table(n: int = 5000, seed: int = 0, noise_sd: float = 0.3):
    """Feature table drawn from a known zero-inflated process.

    Returns (table, truth) where truth holds the generating coefficients,
    per-row true probabilities, and the noiseless conditional means.
    """
    from tornado_damage.dataset import ColumnDescriptor, FeatureTable, Source
    from tornado_damage.nn import sigmoid
    from tornado_damage.transforms import TransformKind, TransformSpec, invert_transform

    rng = np.random.default_rng(seed)
    p_features = 5
    x = rng.normal(size=(n, p_features))
    logit_coef = np.array([1.0, -0.8, 0.6, 0.0, 0.0])
    logit_intercept = 0.3
    lin_coef = np.array([0.6, -0.5, 0.3, 0.2, 0.0])
    lin_intercept = 0.4

    p_true = sigmoid(x @ logit_coef + logit_intercept)
    damaged = rng.random(n) < p_true
    cond_mean = x @ lin_coef + lin_intercept
    outcome_z = np.where(damaged, cond_mean + rng.normal(0.0, noise_sd, n), 0.0)

    outcome_spec = TransformSpec(TransformKind.LOG1P_STANDARDIZE, mean=4.0, sd=1.0)
    raw = np.where(damaged, np.maximum(invert_transform(outcome_spec, outcome_z), 1.0), 0.0)
    outcome_z = np.where(damaged, outcome_z, float(-4.0))  # transform of 0 dollars

    columns = [
        ColumnDescriptor(
            name=f"x{j}", source=Source.STORM, kind=TransformKind.STANDARDIZE,
            unit="synthetic",
            transform=TransformSpec(TransformKind.STANDARDIZE, mean=0.0, sd=1.0),
            natural_mean=0.0,
        )
        for j in range(p_features)
    ]
    table = FeatureTable(
        row_ids=[f"r{i}" for i in range(n)],
        columns=columns,
        matrix=x,
        outcome_z=outcome_z,
        outcome_raw=raw,
        outcome_transform=outcome_spec,
        lats=35.0 + rng.normal(0, 1, n),
        lons=-98.0 + rng.normal(0, 1, n),
        aux_means={"begin_time_minutes": 720.0, "day_of_year": 180.0},
    )
    truth = {
        "logit_coef": logit_coef, "logit_intercept": logit_intercept,
        "lin_coef": lin_coef, "lin_intercept": lin_intercept,
        "p_true": p_true, "cond_mean": cond_mean, "noise_sd": noise_sd,
        "damaged": damaged,
    }
    return table, truth


def write_events_csv(events: list[TornadoEvent], path: Path) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([
            "event_id", "begin_lat", "begin_lon", "begin_datetime",
            "duration_s", "length", "width", "damage_usd", "narrative",
        ])
        for e in events:
            writer.writerow([
                e.event_id, e.begin_lat, e.begin_lon,
                e.begin_time.isoformat(), e.duration_s, e.length, e.width,
                e.damage_usd, e.narrative,
            ])


def write_world_files(world, tmp_path: Path) -> dict[str, Path]:
    """Write the synthetic world to disk in the documented file formats."""
    from tornado_damage.rasters import write_ascii_grid

    paths = {}
    for year, raster in world["rasters"].items():
        p = tmp_path / f"nlcd{year}.asc"
        write_ascii_grid(raster, p)
        paths[f"raster{year}"] = p

    geometry = tmp_path / "regions.csv"
    with geometry.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["region_id", "ring", "lon", "lat"])
        for rid in world["regions"].region_ids:
            for r, ring in enumerate(world["regions"].rings[rid]):
                for lon, lat in ring:
                    writer.writerow([rid, r, lon, lat])
    paths["geometry"] = geometry

    values = tmp_path / "region_values.csv"
    with values.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["region_id", "year"] + RAW_REGION_COLUMNS)
        for year in range(2010, 2018):
            for rid in ("c00", "c01", "c10", "c11"):
                row = region_raw_row(rid, year)
                writer.writerow([rid, year] + [repr(row[c]) for c in RAW_REGION_COLUMNS])
    paths["values"] = values

    cpi = tmp_path / "cpi.csv"
    with cpi.open("w") as fh:
        fh.write("month,index\n")
        for (year, month), value in sorted(make_cpi().values.items()):
            fh.write(f"{year:04d}-{month:02d},{value!r}\n")
    paths["cpi"] = cpi
    return paths
