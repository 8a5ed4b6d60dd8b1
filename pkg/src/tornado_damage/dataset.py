"""Feature table assembly: joins events with rasters and regional tables,
derives variables, fits the column transformations, and assigns splits.

Column roster and transformation kinds follow the variable table of the
modeling protocol: storm scalars, two spline expansions (beginning time of
day and day of year), 17 land cover features, 21 regional socioeconomic
features, and the income-estimate mixture column. Transformations are fitted
on the full assembled dataset, then applied everywhere (training, scenarios,
and the inference service reuse the fitted specs).
"""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .derive import (
    LANDCOVER_FEATURES,
    PipelineConfig,
    aggregate_region_row,
    derive_event_features,
    landcover_row,
)
from .errors import (
    AllCellsDropped,
    BadFractions,
    NoRegionCoverage,
    OutOfCoverage,
    SchemaMismatch,
    UnknownSourceTag,
)
from .events import TornadoEvent
from .footprint import (
    gaussian_footprint,
    region_weight_masses,
    weighted_class_proportions,
    weighted_region_value,
)
from .geometry import RegionIndex
from .inflation import CpiSeries, adjust_inflation
from .rasters import CategoricalRaster, raster_for_year
from .splines import bspline_basis, day_of_year_spec, time_of_day_spec
from .transforms import TransformKind, TransformSpec, apply_transform, fit_transform

REGION_YEAR_RANGE = (2010, 2017)

# Aggregated regional columns extracted per event (post-recipe names).
REGION_COLUMNS = [
    "median_household_income", "population", "median_year_built", "housing_units",
    "lower_quartile_home_value", "median_home_value", "upper_quartile_home_value",
    "gini_index", "mobile_homes", "white", "male", "under_18", "poverty_12mo",
    "hs_25plus", "assoc_25plus", "bach_25plus", "grad_25plus",
    "over_65", "not_working", "commute_over_30", "depart_0000_0459",
]


class Source(str, enum.Enum):
    STORM = "storm"
    NLCD = "nlcd"
    ACS = "acs"
    STORM_ACS = "storm_acs"


class Scope(str, enum.Enum):
    TRAIN = "train"
    CV = "cv"
    TEST = "test"


@dataclass
class ColumnDescriptor:
    name: str
    source: Source
    kind: TransformKind | None  # None = untransformed (binary indicator)
    unit: str
    beforehand: bool = False
    spline_group: str | None = None  # e.g. "begin_time" for basis columns
    transform: TransformSpec | None = None
    natural_mean: float = math.nan  # fitted natural-scale column mean


def _storm(name, kind, unit, beforehand=False, group=None):
    return ColumnDescriptor(name=name, source=Source.STORM, kind=kind, unit=unit,
                            beforehand=beforehand, spline_group=group)


def _nlcd(name):
    return ColumnDescriptor(name=name, source=Source.NLCD, kind=TransformKind.LOG1000_STANDARDIZE,
                            unit="fraction", beforehand=True)


def _acs(name, kind, unit="count"):
    return ColumnDescriptor(name=name, source=Source.ACS, kind=kind, unit=unit, beforehand=True)


def default_roster() -> list[ColumnDescriptor]:
    """The full predictor roster in canonical column order."""
    k1, k2, k3 = TransformKind.STANDARDIZE, TransformKind.LOG1P_STANDARDIZE, TransformKind.LOG1000_STANDARDIZE
    cols: list[ColumnDescriptor] = [
        _storm("duration", k2, "seconds"),
        _storm("begin_lat", k1, "degrees", beforehand=True),
        _storm("begin_lon", k1, "degrees", beforehand=True),
        _storm("length", k2, "source units"),
        _storm("width", k2, "source units"),
        _storm("tornado_area", k2, "source units squared"),
        _storm("multi_vortex", None, "indicator"),
    ]
    cols += [
        _storm(f"begin_time_bs_{i:02d}", k2, "basis value", group="begin_time")
        for i in range(time_of_day_spec().num_basis)
    ]
    cols.append(_storm("year", k1, "calendar year"))
    cols += [
        _storm(f"day_of_year_bs_{i:02d}", k3, "basis value", group="day_of_year")
        for i in range(day_of_year_spec().num_basis)
    ]
    cols += [_nlcd(name) for name in LANDCOVER_FEATURES.values()]
    cols += [
        _nlcd("total_developed_intensity"),
        _nlcd("total_wooded_proportion"),
        _nlcd("total_wooded_developed_interaction"),
    ]
    cols += [
        _acs("median_household_income", k3, "USD"),
        _acs("pct_mobile_homes", k1, "fraction"),
        _acs("population", k2),
        _acs("median_year_built", k2, "calendar year"),
        _acs("housing_units", k2),
        _acs("pct_white", k1, "fraction"),
        _acs("pct_male", k1, "fraction"),
        _acs("pct_under_18", k1, "fraction"),
        _acs("pct_hs", k1, "fraction"),
        _acs("pct_assoc", k1, "fraction"),
        _acs("pct_bach", k1, "fraction"),
        _acs("pct_grad", k1, "fraction"),
        _acs("pct_over_65", k1, "fraction"),
        _acs("lower_quartile_home_value", k2, "USD"),
        _acs("median_home_value", k2, "USD"),
        _acs("upper_quartile_home_value", k2, "USD"),
        _acs("pct_poverty", k2, "fraction"),
        _acs("gini_index", k2, "index"),
        _acs("pct_not_working", k1, "fraction"),
        _acs("pct_commute_over_30", k1, "fraction"),
        _acs("pct_depart_0000_0459", k1, "fraction"),
    ]
    cols.append(ColumnDescriptor(
        name="total_income_estimate", source=Source.STORM_ACS, kind=k1,
        unit="USD x area", beforehand=False,
    ))
    return cols


@dataclass
class FeatureTable:
    row_ids: list[str]
    columns: list[ColumnDescriptor]
    matrix: np.ndarray  # (n, p) transformed predictors
    outcome_z: np.ndarray  # transformed inflation-adjusted damage
    outcome_raw: np.ndarray  # inflation-adjusted damage, USD
    outcome_transform: TransformSpec
    lats: np.ndarray
    lons: np.ndarray
    aux_means: dict[str, float] = field(default_factory=dict)

    @property
    def n_rows(self) -> int:
        return self.matrix.shape[0]

    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def column_index(self, name: str) -> int:
        return self.column_names().index(name)


@dataclass
class DropRecord:
    row_id: str
    reason: str


def _splined(minutes: float, doy: float) -> dict[str, float]:
    time_spec = time_of_day_spec()
    doy_spec = day_of_year_spec()
    out: dict[str, float] = {}
    for i, v in enumerate(bspline_basis(minutes, time_spec)):
        out[f"begin_time_bs_{i:02d}"] = float(v)
    for i, v in enumerate(bspline_basis(doy, doy_spec)):
        out[f"day_of_year_bs_{i:02d}"] = float(v)
    return out


def natural_event_row(
    event: TornadoEvent,
    rasters: dict[int, CategoricalRaster],
    region_values: dict[int, dict[str, dict[str, float]]],
    regions: RegionIndex,
    cpi: CpiSeries,
    config: PipelineConfig,
) -> tuple[dict[str, float], float] | DropRecord:
    """Natural-scale feature record for one event, or why it was dropped.

    region_values is {year: {column: {region_id: value}}} with years already
    restricted to the available range.
    """
    raster = raster_for_year(rasters, event.year)
    try:
        fp = gaussian_footprint(event.begin_lat, event.begin_lon, raster)
        proportions, _ = weighted_class_proportions(raster, fp)
    except (OutOfCoverage, AllCellsDropped) as exc:
        return DropRecord(event.event_id, str(exc))

    masses = region_weight_masses(fp, raster, regions)
    region_year = min(max(event.year, REGION_YEAR_RANGE[0]), REGION_YEAR_RANGE[1])
    per_year = region_values.get(region_year, {})
    extracted: dict[str, float] = {}
    for col in REGION_COLUMNS:
        try:
            extracted[col] = weighted_region_value(per_year.get(col, {}), masses)
        except NoRegionCoverage:
            return DropRecord(event.event_id, f"missing regional value: {col}")

    derived, missing = derive_event_features(
        event.length, event.width, event.narrative, proportions, extracted, config
    )
    if missing:
        name, reason = missing[0]
        return DropRecord(event.event_id, f"missing derived feature {name}: {reason}")

    row: dict[str, float] = {
        "duration": event.duration_s,
        "begin_lat": event.begin_lat,
        "begin_lon": event.begin_lon,
        "length": event.length,
        "width": event.width,
        "year": float(event.year),
    }
    row.update(_splined(event.minutes_since_midnight, float(event.day_of_year)))
    row.update(landcover_row(proportions))
    for col in ("median_household_income", "population", "median_year_built",
                "housing_units", "lower_quartile_home_value", "median_home_value",
                "upper_quartile_home_value", "gini_index"):
        row[col] = extracted[col]
    row.update(derived)

    damage_adj = adjust_inflation(
        event.damage_usd, (event.begin_time.year, event.begin_time.month), cpi
    )
    return row, damage_adj


def assemble_feature_table(
    events: list[TornadoEvent],
    rasters: dict[int, CategoricalRaster],
    region_values: dict[int, dict[str, dict[str, float]]],
    regions: RegionIndex,
    cpi: CpiSeries,
    config: PipelineConfig,
    roster: list[ColumnDescriptor] | None = None,
) -> tuple[FeatureTable, list[DropRecord]]:
    """Assemble, fit transformations on the full assembled data, and encode."""
    columns = roster if roster is not None else default_roster()
    kept_rows: list[dict[str, float]] = []
    kept_events: list[TornadoEvent] = []
    raw_outcomes: list[float] = []
    drops: list[DropRecord] = []
    for event in events:
        result = natural_event_row(event, rasters, region_values, regions, cpi, config)
        if isinstance(result, DropRecord):
            drops.append(result)
            continue
        row, damage_adj = result
        kept_rows.append(row)
        kept_events.append(event)
        raw_outcomes.append(damage_adj)

    n = len(kept_rows)
    natural = np.empty((n, len(columns)))
    for j, col in enumerate(columns):
        natural[:, j] = [row[col.name] for row in kept_rows]

    matrix = np.empty_like(natural)
    for j, col in enumerate(columns):
        col.natural_mean = float(np.mean(natural[:, j])) if n else math.nan
        if col.kind is None:
            col.transform = None
            matrix[:, j] = natural[:, j]
        else:
            try:
                col.transform = fit_transform(col.kind, natural[:, j])
            except Exception as exc:
                raise type(exc)(f"column {col.name}: {exc}") from exc
            matrix[:, j] = apply_transform(col.transform, natural[:, j])

    outcome_raw = np.asarray(raw_outcomes)
    outcome_transform = fit_transform(TransformKind.LOG1P_STANDARDIZE, outcome_raw)
    outcome_z = apply_transform(outcome_transform, outcome_raw)

    aux_means = {
        "begin_time_minutes": float(np.mean([e.minutes_since_midnight for e in kept_events])) if n else math.nan,
        "day_of_year": float(np.mean([e.day_of_year for e in kept_events])) if n else math.nan,
    }
    table = FeatureTable(
        row_ids=[e.event_id for e in kept_events],
        columns=columns,
        matrix=matrix,
        outcome_z=np.asarray(outcome_z),
        outcome_raw=outcome_raw,
        outcome_transform=outcome_transform,
        lats=np.asarray([e.begin_lat for e in kept_events]),
        lons=np.asarray([e.begin_lon for e in kept_events]),
        aux_means=aux_means,
    )
    return table, drops


@dataclass
class SplitAssignment:
    seed: int
    fractions: tuple[float, float, float]
    labels: np.ndarray  # per-row Scope values as strings

    def indices(self, scope: Scope) -> np.ndarray:
        return np.nonzero(self.labels == scope.value)[0]

    def counts(self) -> dict[str, int]:
        return {s.value: int(np.sum(self.labels == s.value)) for s in Scope}


def split(
    n_rows: int,
    seed: int,
    fractions: tuple[float, float, float] = (0.6, 0.2, 0.2),
) -> SplitAssignment:
    """Random 60/20/20 split by shuffling then slicing at rounded cumulative
    boundaries (half-up), which reproduces 13,229/4,409/4,410 at n=22,048."""
    if any(f <= 0 for f in fractions) or abs(sum(fractions) - 1.0) > 1e-9:
        raise BadFractions(f"fractions must be positive and sum to 1, got {fractions}")
    b1 = math.floor(n_rows * fractions[0] + 0.5)
    b2 = math.floor(n_rows * (fractions[0] + fractions[1]) + 0.5)
    perm = np.random.default_rng(seed).permutation(n_rows)
    labels = np.empty(n_rows, dtype=object)
    labels[perm[:b1]] = Scope.TRAIN.value
    labels[perm[b1:b2]] = Scope.CV.value
    labels[perm[b2:]] = Scope.TEST.value
    return SplitAssignment(seed=seed, fractions=fractions, labels=labels)


VARIABLE_SET_NAMES = ("beforehand", "storm_characteristic", "combined", "no_lc", "no_acs")


def variable_sets(table: FeatureTable) -> dict[str, list[int]]:
    """Column-index subsets for the five compared variable sets."""
    for col in table.columns:
        if not isinstance(col.source, Source):
            raise UnknownSourceTag(f"column {col.name} has source {col.source!r}")
    sets: dict[str, list[int]] = {name: [] for name in VARIABLE_SET_NAMES}
    for j, col in enumerate(table.columns):
        mixture = col.source is Source.STORM_ACS
        if col.beforehand:
            sets["beforehand"].append(j)
        if col.source is Source.STORM and not col.beforehand:
            sets["storm_characteristic"].append(j)
        sets["combined"].append(j)
        if col.source is not Source.NLCD:
            sets["no_lc"].append(j)
        if col.source is not Source.ACS and not mixture:
            sets["no_acs"].append(j)
    return sets


# ---------------------------------------------------------------------------
# Persistence: matrix CSV + JSON metadata sidecar; split as JSON.

def _spec_to_json(spec: TransformSpec | None):
    if spec is None:
        return None
    return {"kind": spec.kind.value, "mean": spec.mean, "sd": spec.sd}


def _spec_from_json(obj) -> TransformSpec | None:
    if obj is None:
        return None
    return TransformSpec(kind=TransformKind(obj["kind"]), mean=obj["mean"], sd=obj["sd"])


def save_table(table: FeatureTable, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row_id", "lat", "lon", "outcome_raw", "outcome_z"] + table.column_names())
        for i in range(table.n_rows):
            writer.writerow(
                [table.row_ids[i], repr(float(table.lats[i])), repr(float(table.lons[i])),
                 repr(float(table.outcome_raw[i])), repr(float(table.outcome_z[i]))]
                + [repr(float(v)) for v in table.matrix[i]]
            )
    meta = {
        "columns": [
            {
                "name": c.name,
                "source": c.source.value,
                "kind": c.kind.value if c.kind else None,
                "unit": c.unit,
                "beforehand": c.beforehand,
                "spline_group": c.spline_group,
                "transform": _spec_to_json(c.transform),
                "natural_mean": c.natural_mean,
            }
            for c in table.columns
        ],
        "outcome_transform": _spec_to_json(table.outcome_transform),
        "aux_means": table.aux_means,
    }
    path.with_suffix(path.suffix + ".meta.json").write_text(json.dumps(meta, indent=2))


def load_table(path: str | Path) -> FeatureTable:
    path = Path(path)
    meta = json.loads(path.with_suffix(path.suffix + ".meta.json").read_text())
    columns = []
    for c in meta["columns"]:
        try:
            source = Source(c["source"])
        except ValueError:
            raise UnknownSourceTag(f"column {c['name']} has source tag {c['source']!r}") from None
        columns.append(ColumnDescriptor(
            name=c["name"],
            source=source,
            kind=TransformKind(c["kind"]) if c["kind"] else None,
            unit=c["unit"],
            beforehand=c["beforehand"],
            spline_group=c["spline_group"],
            transform=_spec_from_json(c["transform"]),
            natural_mean=c["natural_mean"],
        ))
    row_ids, lats, lons, outcome_raw, outcome_z, rows = [], [], [], [], [], []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        expected = ["row_id", "lat", "lon", "outcome_raw", "outcome_z"] + [c.name for c in columns]
        if header != expected:
            raise SchemaMismatch(f"{path}: header does not match metadata roster")
        for row in reader:
            row_ids.append(row[0])
            lats.append(float(row[1]))
            lons.append(float(row[2]))
            outcome_raw.append(float(row[3]))
            outcome_z.append(float(row[4]))
            rows.append([float(v) for v in row[5:]])
    return FeatureTable(
        row_ids=row_ids,
        columns=columns,
        matrix=np.asarray(rows) if rows else np.empty((0, len(columns))),
        outcome_z=np.asarray(outcome_z),
        outcome_raw=np.asarray(outcome_raw),
        outcome_transform=_spec_from_json(meta["outcome_transform"]),
        lats=np.asarray(lats),
        lons=np.asarray(lons),
        aux_means=meta["aux_means"],
    )


def save_split(assignment: SplitAssignment, row_ids: list[str], path: str | Path) -> None:
    obj = {
        "seed": assignment.seed,
        "fractions": list(assignment.fractions),
        "assignment": {rid: label for rid, label in zip(row_ids, assignment.labels)},
    }
    Path(path).write_text(json.dumps(obj, indent=2))


def load_split(path: str | Path, row_ids: list[str]) -> SplitAssignment:
    obj = json.loads(Path(path).read_text())
    labels = np.asarray([obj["assignment"][rid] for rid in row_ids], dtype=object)
    return SplitAssignment(
        seed=obj["seed"], fractions=tuple(obj["fractions"]), labels=labels
    )


def load_region_tables(
    path: str | Path, config: PipelineConfig
) -> dict[int, dict[str, dict[str, float]]]:
    """Read a region-by-year table and apply the aggregation recipes.

    Input CSV columns: region_id, year, then raw value columns (empty cell =
    missing). Output: {year: {aggregated column: {region_id: value}}}; an
    aggregate with any missing input is simply absent for that region/year.
    """
    path = Path(path)
    out: dict[int, dict[str, dict[str, float]]] = {}
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "region_id" not in reader.fieldnames or "year" not in reader.fieldnames:
            raise SchemaMismatch(f"{path}: need region_id and year columns")
        for row in reader:
            rid = row["region_id"]
            year = int(row["year"])
            raw = {
                k: float(v)
                for k, v in row.items()
                if k not in ("region_id", "year") and v not in (None, "")
            }
            aggregated: dict[str, float] = {}
            consumed: set[str] = set()
            for recipe in config.aggregation_recipes:
                needed = recipe.inputs + recipe.numerator + recipe.denominator
                consumed.update(needed)
                if all(c in raw for c in needed):
                    available = {c: raw[c] for c in needed}
                    aggregated[recipe.output] = aggregate_region_row(available, [recipe])[recipe.output]
            for col, value in raw.items():
                if col not in consumed:
                    aggregated.setdefault(col, value)
            per_year = out.setdefault(year, {})
            for col, value in aggregated.items():
                per_year.setdefault(col, {})[rid] = value
    return out


def write_drop_report(drops: list[DropRecord], path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row_id", "reason"])
        for d in drops:
            writer.writerow([d.row_id, d.reason])
