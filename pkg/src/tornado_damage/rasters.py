"""Single-band categorical rasters in the ESRI ASCII grid text format.

Header lines (any case): ncols, nrows, xllcorner, yllcorner, cellsize,
NODATA_value; then nrows whitespace-separated data rows, northernmost first.
Coordinates are degrees; cell (0, 0) is the northwest corner.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import SchemaMismatch

# Land cover legend (class code -> name). Codes 0 and 12 are excluded from
# proportion features; 21-24 are the developed classes; 41/42/43/90 wooded.
LANDCOVER_LEGEND = {
    0: "Unclassified",
    11: "Open Water",
    12: "Perennial Ice/Snow",
    21: "Developed Open Space",
    22: "Developed Low Intensity",
    23: "Developed Medium Intensity",
    24: "Developed High Intensity",
    31: "Barren Land",
    41: "Deciduous Forest",
    42: "Evergreen Forest",
    43: "Mixed Forest",
    52: "Shrub/Scrub",
    71: "Grassland/Herbaceous",
    81: "Pasture/Hay",
    82: "Cultivated Crops",
    90: "Woody Wetlands",
    95: "Emergent Herbaceous Wetlands",
}

EXCLUDED_CLASSES = (0, 12)
DEVELOPED_CLASSES = (21, 22, 23, 24)
WOODED_CLASSES = (41, 42, 43, 90)

RASTER_VINTAGES = (2001, 2006, 2011)


def vintage_for_year(year: int) -> int:
    """Raster vintage as a step function of event year."""
    if year < 2006:
        return 2001
    if year < 2011:
        return 2006
    return 2011


@dataclass
class CategoricalRaster:
    values: np.ndarray  # (nrows, ncols) int, row 0 northernmost
    xll: float
    yll: float
    cellsize: float
    nodata: int
    vintage: int | None = None

    @property
    def nrows(self) -> int:
        return self.values.shape[0]

    @property
    def ncols(self) -> int:
        return self.values.shape[1]

    def cell_center(self, row: int, col: int) -> tuple[float, float]:
        """(lat, lon) of the center of cell (row, col)."""
        lon = self.xll + (col + 0.5) * self.cellsize
        lat = self.yll + (self.nrows - row - 0.5) * self.cellsize
        return lat, lon

    def col_centers(self) -> np.ndarray:
        return self.xll + (np.arange(self.ncols) + 0.5) * self.cellsize

    def row_centers(self) -> np.ndarray:
        """Latitudes of row centers, index 0 northernmost."""
        return self.yll + (self.nrows - np.arange(self.nrows) - 0.5) * self.cellsize

    def contains(self, lat: float, lon: float) -> bool:
        return (
            self.xll <= lon <= self.xll + self.ncols * self.cellsize
            and self.yll <= lat <= self.yll + self.nrows * self.cellsize
        )


def read_ascii_grid(path: str | Path, vintage: int | None = None) -> CategoricalRaster:
    path = Path(path)
    header: dict[str, float] = {}
    rows: list[list[int]] = []
    with path.open() as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            key = parts[0].lower()
            if len(parts) == 2 and key in ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value"):
                header[key] = float(parts[1])
            else:
                rows.append([int(p) for p in parts])
    required = {"ncols", "nrows", "xllcorner", "yllcorner", "cellsize"}
    missing = required - header.keys()
    if missing:
        raise SchemaMismatch(f"{path}: missing header fields {sorted(missing)}")
    values = np.asarray(rows, dtype=np.int64)
    if values.shape != (int(header["nrows"]), int(header["ncols"])):
        raise SchemaMismatch(
            f"{path}: data shape {values.shape} does not match header "
            f"({int(header['nrows'])}, {int(header['ncols'])})"
        )
    return CategoricalRaster(
        values=values,
        xll=header["xllcorner"],
        yll=header["yllcorner"],
        cellsize=header["cellsize"],
        nodata=int(header.get("nodata_value", -9999)),
        vintage=vintage,
    )


def write_ascii_grid(raster: CategoricalRaster, path: str | Path) -> None:
    path = Path(path)
    with path.open("w") as fh:
        fh.write(f"ncols {raster.ncols}\n")
        fh.write(f"nrows {raster.nrows}\n")
        fh.write(f"xllcorner {raster.xll!r}\n")
        fh.write(f"yllcorner {raster.yll!r}\n")
        fh.write(f"cellsize {raster.cellsize!r}\n")
        fh.write(f"NODATA_value {raster.nodata}\n")
        for row in raster.values:
            fh.write(" ".join(str(int(v)) for v in row) + "\n")


def load_raster_set(paths: dict[int, str | Path]) -> dict[int, CategoricalRaster]:
    """Load {vintage year: raster}. Missing vintages fall back at lookup time."""
    return {year: read_ascii_grid(p, vintage=year) for year, p in paths.items()}


def raster_for_year(rasters: dict[int, CategoricalRaster], year: int) -> CategoricalRaster:
    """Pick the raster for an event year; falls back to the closest earlier
    available vintage when the nominal one was not supplied."""
    nominal = vintage_for_year(year)
    if nominal in rasters:
        return rasters[nominal]
    earlier = [v for v in rasters if v <= nominal]
    if earlier:
        return rasters[max(earlier)]
    return rasters[min(rasters)]
