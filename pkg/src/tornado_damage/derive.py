"""Derived explanatory variables, narrative flags, and regional aggregation.

All outputs are on natural (untransformed) scales. A division by zero makes
the affected feature missing instead of raising; the caller drops and reports
such rows.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .rasters import DEVELOPED_CLASSES, WOODED_CLASSES


class AggregationOp(str, enum.Enum):
    SUM = "sum"
    RATIO_OF_SUMS = "ratio_of_sums"
    PRODUCT = "product"


@dataclass(frozen=True)
class AggregationRecipe:
    output: str
    op: AggregationOp
    inputs: tuple[str, ...] = ()
    numerator: tuple[str, ...] = ()
    denominator: tuple[str, ...] = ()


@dataclass
class PipelineConfig:
    multi_vortex_patterns: list[str]
    impervious_medians: dict[int, float]
    aggregation_recipes: list[AggregationRecipe] = field(default_factory=list)


def load_pipeline_config(path: str | Path | None = None) -> PipelineConfig:
    """Read the declarative pipeline config; defaults ship with the package."""
    if path is None:
        raw = json.loads(resources.files("tornado_damage").joinpath("config/pipeline.json").read_text())
    else:
        raw = json.loads(Path(path).read_text())
    recipes = [
        AggregationRecipe(
            output=r["output"],
            op=AggregationOp(r["op"]),
            inputs=tuple(r.get("inputs", ())),
            numerator=tuple(r.get("numerator", ())),
            denominator=tuple(r.get("denominator", ())),
        )
        for r in raw.get("aggregation_recipes", [])
    ]
    return PipelineConfig(
        multi_vortex_patterns=list(raw["multi_vortex_patterns"]),
        impervious_medians={int(k): float(v) for k, v in raw["impervious_medians"].items()},
        aggregation_recipes=recipes,
    )


def multi_vortex_flag(narrative: str, patterns: list[str] | None = None) -> bool:
    """Case-insensitive substring search over the configured pattern set."""
    if patterns is None:
        patterns = load_pipeline_config().multi_vortex_patterns
    text = narrative.lower()
    return any(p.lower() in text for p in patterns)


def aggregate_region_row(raw: dict[str, float], recipes: list[AggregationRecipe]) -> dict[str, float]:
    """Apply aggregation recipes to one region's raw columns.

    Recipe outputs replace their input columns; columns not consumed by any
    recipe pass through unchanged. Referencing a missing column raises KeyError.
    """
    out: dict[str, float] = {}
    consumed: set[str] = set()
    for recipe in recipes:
        if recipe.op is AggregationOp.SUM:
            out[recipe.output] = sum(raw[c] for c in recipe.inputs)
            consumed.update(recipe.inputs)
        elif recipe.op is AggregationOp.PRODUCT:
            value = 1.0
            for c in recipe.inputs:
                value *= raw[c]
            out[recipe.output] = value
            consumed.update(recipe.inputs)
        else:
            num = sum(raw[c] for c in recipe.numerator)
            den = sum(raw[c] for c in recipe.denominator)
            if den == 0:
                raise ZeroDivisionError(f"recipe {recipe.output}: denominator sums to zero")
            out[recipe.output] = num / den
            consumed.update(recipe.numerator)
            consumed.update(recipe.denominator)
    for col, value in raw.items():
        if col not in consumed and col not in out:
            out[col] = value
    return out


# Table roster of land cover proportion features: class code -> feature name.
LANDCOVER_FEATURES = {
    11: "lc_open_water",
    21: "lc_developed_open_space",
    22: "lc_developed_low_intensity",
    23: "lc_developed_medium_intensity",
    24: "lc_developed_high_intensity",
    31: "lc_barren_land",
    41: "lc_deciduous_forest",
    42: "lc_evergreen_forest",
    43: "lc_mixed_forest",
    52: "lc_shrub_scrub",
    81: "lc_pasture_hay",
    82: "lc_cultivated_crops",
    90: "lc_woody_wetland",
    95: "lc_emergent_herbaceous_wetland",
}


def landcover_row(land_proportions: dict[int, float]) -> dict[str, float]:
    """Raw per-class proportion features; classes absent from the footprint
    show up as 0."""
    return {name: land_proportions.get(code, 0.0) for code, name in LANDCOVER_FEATURES.items()}


def location_derived_features(
    land_proportions: dict[int, float],
    region_values: dict[str, float],
    config: PipelineConfig,
) -> tuple[dict[str, float], list[tuple[str, str]]]:
    """Derived variables knowable from location alone: developed-intensity
    composites and the regional percentage variables. Returns (features,
    missing) where missing lists (feature, reason) for zero denominators."""
    features: dict[str, float] = {}
    missing: list[tuple[str, str]] = []

    tdi = sum(
        land_proportions.get(code, 0.0) * config.impervious_medians.get(code, 0.0)
        for code in DEVELOPED_CLASSES
    )
    twp = sum(land_proportions.get(code, 0.0) for code in WOODED_CLASSES)
    features["total_developed_intensity"] = tdi
    features["total_wooded_proportion"] = twp
    features["total_wooded_developed_interaction"] = tdi * twp

    def ratio(name: str, numerator: str, denominator_value: float, denominator_name: str):
        if denominator_value == 0:
            missing.append((name, f"{denominator_name} is zero"))
            return
        features[name] = region_values[numerator] / denominator_value

    population = region_values["population"]
    adults = population - region_values["under_18"]
    housing_units = region_values["housing_units"]

    ratio("pct_white", "white", population, "population")
    ratio("pct_male", "male", population, "population")
    ratio("pct_under_18", "under_18", population, "population")
    ratio("pct_over_65", "over_65", population, "population")
    ratio("pct_poverty", "poverty_12mo", population, "population")
    ratio("pct_hs", "hs_25plus", adults, "adult population")
    ratio("pct_assoc", "assoc_25plus", adults, "adult population")
    ratio("pct_bach", "bach_25plus", adults, "adult population")
    ratio("pct_grad", "grad_25plus", adults, "adult population")
    ratio("pct_not_working", "not_working", adults, "adult population")
    ratio("pct_commute_over_30", "commute_over_30", adults, "adult population")
    ratio("pct_depart_0000_0459", "depart_0000_0459", adults, "adult population")
    ratio("pct_mobile_homes", "mobile_homes", housing_units, "housing units")
    return features, missing


def derive_event_features(
    length: float,
    width: float,
    narrative: str,
    land_proportions: dict[int, float],
    region_values: dict[str, float],
    config: PipelineConfig,
) -> tuple[dict[str, float], list[tuple[str, str]]]:
    """All derived variables for one event: the storm-side products plus the
    location-derived set plus the income-estimate mixture."""
    features, missing = location_derived_features(land_proportions, region_values, config)
    features["tornado_area"] = length * width
    features["multi_vortex"] = 1.0 if multi_vortex_flag(narrative, config.multi_vortex_patterns) else 0.0
    features["total_income_estimate"] = features["tornado_area"] * region_values["median_household_income"]
    return features, missing
