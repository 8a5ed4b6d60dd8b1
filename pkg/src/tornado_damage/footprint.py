"""Gaussian-weighted extraction of raster classes and regional values.

A footprint is an isotropic Gaussian (default sigma 9054 m) evaluated at
raster cell centers within a square window (default side 54,330 m) centered
on an event's beginning coordinates, renormalized to sum 1 over the covered
cells. Distances use a local azimuthal-equidistant approximation: meters
east/north of the center on a spherical earth (radius 6,371,000 m), which is
accurate to well under a cell at the 27 km half-width used here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AllCellsDropped, NoRegionCoverage, OutOfCoverage
from .geometry import RegionIndex
from .rasters import EXCLUDED_CLASSES, CategoricalRaster

EARTH_RADIUS_M = 6_371_000.0
DEFAULT_SIGMA_M = 9054.0
DEFAULT_HALF_WIDTH_M = 27_165.0  # 54,330 m square side


@dataclass
class GaussianFootprint:
    center_lat: float
    center_lon: float
    sigma_m: float
    half_width_m: float
    row0: int  # inclusive, raster row of the window's north edge
    col0: int
    weights: np.ndarray  # (window_rows, window_cols), sums to 1
    partial: bool  # window clipped at a raster edge

    def cell_latlons(self, raster: CategoricalRaster) -> tuple[np.ndarray, np.ndarray]:
        rows = np.arange(self.row0, self.row0 + self.weights.shape[0])
        cols = np.arange(self.col0, self.col0 + self.weights.shape[1])
        lats = raster.row_centers()[rows]
        lons = raster.col_centers()[cols]
        return lats, lons

    def window_values(self, raster: CategoricalRaster) -> np.ndarray:
        return raster.values[
            self.row0: self.row0 + self.weights.shape[0],
            self.col0: self.col0 + self.weights.shape[1],
        ]


def local_meters(lat: float, lon: float, center_lat: float, center_lon: float) -> tuple[float, float]:
    """(east, north) meters of a point relative to the center."""
    east = EARTH_RADIUS_M * math.cos(math.radians(center_lat)) * math.radians(lon - center_lon)
    north = EARTH_RADIUS_M * math.radians(lat - center_lat)
    return east, north


def gaussian_footprint(
    center_lat: float,
    center_lon: float,
    raster: CategoricalRaster,
    sigma_m: float = DEFAULT_SIGMA_M,
    half_width_m: float = DEFAULT_HALF_WIDTH_M,
) -> GaussianFootprint:
    """Build the normalized Gaussian cell-weight window around a center.

    Raises OutOfCoverage when the window intersects zero raster cells. A
    window clipped at the raster edge is flagged partial and renormalized
    over the available cells.
    """
    if sigma_m <= 0:
        raise ValueError(f"sigma_m must be positive, got {sigma_m}")
    dlat = math.degrees(half_width_m / EARTH_RADIUS_M)
    dlon = math.degrees(half_width_m / (EARTH_RADIUS_M * math.cos(math.radians(center_lat))))

    row_lats = raster.row_centers()
    col_lons = raster.col_centers()
    row_sel = np.nonzero(np.abs(row_lats - center_lat) <= dlat)[0]
    col_sel = np.nonzero(np.abs(col_lons - center_lon) <= dlon)[0]
    if row_sel.size == 0 or col_sel.size == 0:
        raise OutOfCoverage(
            f"window around ({center_lat}, {center_lon}) covers no cells of the raster"
        )
    row0, row1 = int(row_sel[0]), int(row_sel[-1])
    col0, col1 = int(col_sel[0]), int(col_sel[-1])
    # Clipped iff a cell one step beyond the raster edge would still be inside
    # the window.
    step = raster.cellsize
    partial = (
        (row0 == 0 and row_lats[0] + step <= center_lat + dlat)
        or (row1 == raster.nrows - 1 and row_lats[-1] - step >= center_lat - dlat)
        or (col0 == 0 and col_lons[0] - step >= center_lon - dlon)
        or (col1 == raster.ncols - 1 and col_lons[-1] + step <= center_lon + dlon)
    )

    lats = row_lats[row0: row1 + 1]
    lons = col_lons[col0: col1 + 1]
    north = EARTH_RADIUS_M * np.radians(lats - center_lat)
    east = EARTH_RADIUS_M * math.cos(math.radians(center_lat)) * np.radians(lons - center_lon)
    d2 = north[:, None] ** 2 + east[None, :] ** 2
    weights = np.exp(-d2 / (2.0 * sigma_m**2))
    weights /= weights.sum()
    return GaussianFootprint(
        center_lat=center_lat,
        center_lon=center_lon,
        sigma_m=sigma_m,
        half_width_m=half_width_m,
        row0=row0,
        col0=col0,
        weights=weights,
        partial=bool(partial),
    )


def weighted_class_proportions(
    raster: CategoricalRaster, footprint: GaussianFootprint
) -> tuple[dict[int, float], dict[int, float]]:
    """Weight-mass proportion per land cover class under the footprint.

    Unclassified and Perennial Ice/Snow cells (and nodata) are dropped and
    the remainder renormalized to sum 1. Returns (proportions, dropped mass
    per excluded code). Raises AllCellsDropped if nothing remains.
    """
    window = footprint.window_values(raster)
    w = footprint.weights
    codes, inverse = np.unique(window, return_inverse=True)
    masses = np.bincount(inverse.ravel(), weights=w.ravel(), minlength=codes.size)

    dropped: dict[int, float] = {}
    kept: dict[int, float] = {}
    for code, mass in zip(codes.tolist(), masses.tolist()):
        if code in EXCLUDED_CLASSES or code == raster.nodata:
            dropped[code] = mass
        else:
            kept[code] = mass
    total = sum(kept.values())
    if total <= 0.0:
        raise AllCellsDropped(f"footprint covers only excluded classes {sorted(dropped)}")
    return {code: mass / total for code, mass in kept.items()}, dropped


def region_weight_masses(
    footprint: GaussianFootprint, raster: CategoricalRaster, regions: RegionIndex
) -> dict[str, float]:
    """Footprint weight mass falling in each region (cells outside all
    regions contribute nothing)."""
    lats, lons = footprint.cell_latlons(raster)
    masses: dict[str, float] = {}
    for i, lat in enumerate(lats):
        for j, lon in enumerate(lons):
            rid = regions.assign(float(lat), float(lon))
            if rid is not None:
                masses[rid] = masses.get(rid, 0.0) + float(footprint.weights[i, j])
    return masses


def weighted_region_value(values: dict[str, float], masses: dict[str, float]) -> float:
    """Mass-weighted mean of region values over regions carrying any weight.

    Regions absent from `values` are excluded from both numerator and
    denominator. Raises NoRegionCoverage when no valued region has mass.
    """
    num = 0.0
    den = 0.0
    for rid, mass in masses.items():
        if rid in values:
            num += values[rid] * mass
            den += mass
    if den <= 0.0:
        raise NoRegionCoverage("no footprint weight mass lands in any valued region")
    return num / den
