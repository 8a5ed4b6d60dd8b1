#!/usr/bin/env python3
"""Generate a self-contained synthetic input set (events, land cover rasters,
county geometry and year tables, CPI series, cities, and a boundary polygon)
in the documented file formats, so the full CLI pipeline can run without any
external data."""

import argparse
import csv
import math
from datetime import datetime, timedelta
from pathlib import Path

import numpy as np

LANDCOVER_CODES = [11, 21, 22, 23, 24, 31, 41, 42, 43, 52, 71, 81, 82, 90, 95]

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

CENTER_LAT, CENTER_LON = 35.0, -98.0


def write_raster(path: Path, seed: int, n: int = 60, cellsize: float = 0.025):
    rng = np.random.default_rng(seed)
    values = rng.choice(LANDCOVER_CODES, size=(n, n))
    extent = n * cellsize
    with path.open("w") as fh:
        fh.write(f"ncols {n}\nnrows {n}\n")
        fh.write(f"xllcorner {CENTER_LON - extent / 2!r}\n")
        fh.write(f"yllcorner {CENTER_LAT - extent / 2!r}\n")
        fh.write(f"cellsize {cellsize!r}\nNODATA_value -9999\n")
        for row in values:
            fh.write(" ".join(str(v) for v in row) + "\n")


def write_regions(path: Path):
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["region_id", "ring", "lon", "lat"])
        for i, lat0 in enumerate((34.5, 35.0)):
            for j, lon0 in enumerate((-98.5, -98.0)):
                rid = f"c{i}{j}"
                for lon, lat in [(lon0, lat0), (lon0 + 0.5, lat0),
                                 (lon0 + 0.5, lat0 + 0.5), (lon0, lat0 + 0.5)]:
                    writer.writerow([rid, 0, lon, lat])


def region_row(region_id: str, year: int) -> dict:
    stable = sum(ord(ch) for ch in region_id)
    base = 1000 + 137 * (stable % 7) + 3 * (year - 2010)
    tilt = (stable % 9) / 100.0
    row = {col: float(base + 11 * k + 7 * (k % 3) * (stable % 4))
           for k, col in enumerate(RAW_REGION_COLUMNS)}
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


def write_region_values(path: Path):
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["region_id", "year"] + RAW_REGION_COLUMNS)
        for year in range(2010, 2018):
            for rid in ("c00", "c01", "c10", "c11"):
                row = region_row(rid, year)
                writer.writerow([rid, year] + [repr(row[c]) for c in RAW_REGION_COLUMNS])


def write_cpi(path: Path):
    with path.open("w") as fh:
        fh.write("month,index\n")
        for year in range(1996, 2021):
            for month in range(1, 13):
                fh.write(f"{year:04d}-{month:02d},{150.0 + (year - 1996) * 4.0 + month * 0.2!r}\n")


def write_events(path: Path, n: int, seed: int):
    rng = np.random.default_rng(seed)
    spread = min(n, 16)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["event_id", "begin_lat", "begin_lon", "begin_datetime",
                         "duration_s", "length", "width", "damage_usd", "narrative"])
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
            narrative = ("a multi-vortex tornado" if rng.random() < 0.1
                         else "a tornado touched down")
            writer.writerow([
                f"ev{i:05d}", lat, lon, start.isoformat(),
                float(rng.uniform(30, 3600)), float(rng.uniform(0.05, 30.0)),
                float(rng.uniform(5, 1500)), damage, narrative,
            ])


def write_cities(path: Path):
    cities = [
        ("Centerville", 35.05, -98.05, 410_000),
        ("Northgate", 35.35, -98.2, 160_000),
        ("Eastburg", 34.9, -97.7, 120_500),
        ("Smalltown", 34.7, -98.3, 45_000),  # under the population floor
    ]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["name", "lat", "lon", "population"])
        writer.writerows(cities)


def write_boundary(path: Path):
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["region_id", "ring", "lon", "lat"])
        for lon, lat in [(-98.5, 34.5), (-97.5, 34.5), (-97.5, 35.5), (-98.5, 35.5)]:
            writer.writerow(["study_area", 0, lon, lat])


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="synthetic_inputs")
    parser.add_argument("--events", type=int, default=400)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_raster(out / "nlcd2001.asc", seed=args.seed + 1)
    write_raster(out / "nlcd2006.asc", seed=args.seed + 2)
    write_raster(out / "nlcd2011.asc", seed=args.seed + 3)
    write_regions(out / "regions.csv")
    write_region_values(out / "region_values.csv")
    write_cpi(out / "cpi.csv")
    write_events(out / "events.csv", n=args.events, seed=args.seed + 7)
    write_cities(out / "cities.csv")
    write_boundary(out / "boundary.csv")
    print(f"synthetic inputs written to {out}/")


if __name__ == "__main__":
    main()
