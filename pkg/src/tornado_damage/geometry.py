"""Polygon handling: even-odd point-in-polygon and the ring-file format.

Polygon files are CSV with header ``region_id,ring,lon,lat``, one vertex per
line; vertices of a ring appear consecutively in file order. A region may
have several rings; containment is even-odd across all of them, so interior
rings act as holes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from .errors import InvalidPolygon, SchemaMismatch

Ring = list[tuple[float, float]]  # (lon, lat)


def point_in_rings(lon: float, lat: float, rings: list[Ring]) -> bool:
    """Even-odd containment test over a set of rings.

    Crossings are counted with the half-open edge convention: an edge counts
    when exactly one endpoint lies strictly above the query latitude, and the
    ray-edge intersection is strictly east of the point. Points exactly on a
    vertex or edge therefore resolve deterministically (generally to the
    south/west side).
    """
    inside = False
    for ring in rings:
        n = len(ring)
        if n < 3:
            raise InvalidPolygon(f"ring has {n} vertices, need at least 3")
        j = n - 1
        for i in range(n):
            xi, yi = ring[i]
            xj, yj = ring[j]
            if (yi > lat) != (yj > lat):
                x_cross = (xj - xi) * (lat - yi) / (yj - yi) + xi
                if lon < x_cross:
                    inside = not inside
            j = i
    return inside


@dataclass
class RegionIndex:
    """Region polygons with bounding-box prefiltered point assignment."""

    region_ids: list[str]
    rings: dict[str, list[Ring]]
    bboxes: dict[str, tuple[float, float, float, float]]  # lon0, lat0, lon1, lat1

    @classmethod
    def from_rings(cls, rings: dict[str, list[Ring]]) -> "RegionIndex":
        bboxes = {}
        for rid, rlist in rings.items():
            pts = [p for ring in rlist for p in ring]
            if not pts:
                raise InvalidPolygon(f"region {rid} has no vertices")
            lons = [p[0] for p in pts]
            lats = [p[1] for p in pts]
            bboxes[rid] = (min(lons), min(lats), max(lons), max(lats))
        return cls(region_ids=list(rings), rings=rings, bboxes=bboxes)

    def assign(self, lat: float, lon: float) -> str | None:
        """First region (input order) containing the point, or None."""
        for rid in self.region_ids:
            lon0, lat0, lon1, lat1 = self.bboxes[rid]
            if not (lon0 <= lon <= lon1 and lat0 <= lat <= lat1):
                continue
            if point_in_rings(lon, lat, self.rings[rid]):
                return rid
        return None


def load_rings(path: str | Path) -> dict[str, list[Ring]]:
    """Read a ring CSV into {region_id: [rings]} preserving file order."""
    path = Path(path)
    out: dict[str, dict[str, Ring]] = {}
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        expected = {"region_id", "ring", "lon", "lat"}
        if reader.fieldnames is None or not expected.issubset(reader.fieldnames):
            raise SchemaMismatch(f"{path}: expected columns {sorted(expected)}, got {reader.fieldnames}")
        for row in reader:
            rid = row["region_id"]
            ring_key = row["ring"]
            out.setdefault(rid, {}).setdefault(ring_key, []).append(
                (float(row["lon"]), float(row["lat"]))
            )
    result = {rid: list(rings.values()) for rid, rings in out.items()}
    for rid, rlist in result.items():
        for ring in rlist:
            if len(ring) < 3:
                raise InvalidPolygon(f"region {rid}: ring has {len(ring)} vertices")
    return result


def load_region_index(path: str | Path) -> RegionIndex:
    return RegionIndex.from_rings(load_rings(path))
