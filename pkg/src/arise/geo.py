"""Geodesic math and an in-memory grid index for nearby-item queries.

Distances use a spherical Earth with mean radius 6,371,000 m, which is
plenty for the sub-kilometer "how far is this report" use. The grid does
not wrap at the antimeridian; all supported regions are far from it.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

EARTH_RADIUS_M = 6_371_000.0

# ~1.1 km at the equator: coarse enough for small datasets, fine enough to prune.
DEFAULT_CELL_SIZE_DEG = 0.01


@dataclass(frozen=True)
class GeoPoint:
    """A WGS84-style lat/lon pair in degrees, validated on construction."""

    lat: float
    lon: float

    def __post_init__(self):
        if not (-90.0 <= self.lat <= 90.0):
            raise ValueError(f"latitude {self.lat} outside [-90, 90]")
        if not (-180.0 <= self.lon <= 180.0):
            raise ValueError(f"longitude {self.lon} outside [-180, 180]")


def haversine_distance(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance between two points, in meters."""
    phi1 = math.radians(a.lat)
    phi2 = math.radians(b.lat)
    d_phi = math.radians(b.lat - a.lat)
    d_lambda = math.radians(b.lon - a.lon)
    h = math.sin(d_phi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(d_lambda / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


class SpatialIndex:
    """Uniform lat/lon grid over (item_id, GeoPoint) pairs.

    Each item lives in exactly one cell; re-inserting an id moves it.
    Many readers may query concurrently; writes take an exclusive lock.
    """

    def __init__(self, cell_size_deg: float = DEFAULT_CELL_SIZE_DEG):
        if cell_size_deg <= 0:
            raise ValueError("cell_size_deg must be positive")
        self.cell_size_deg = cell_size_deg
        self._cells: dict[tuple[int, int], dict[str, GeoPoint]] = {}
        self._locations: dict[str, GeoPoint] = {}
        self._lock = threading.Lock()

    def _cell_key(self, p: GeoPoint) -> tuple[int, int]:
        return (math.floor(p.lat / self.cell_size_deg), math.floor(p.lon / self.cell_size_deg))

    def __len__(self) -> int:
        return len(self._locations)

    def insert(self, item_id: str, p: GeoPoint) -> None:
        """Insert or move an item. Re-insert replaces the previous location."""
        with self._lock:
            old = self._locations.get(item_id)
            if old is not None:
                old_key = self._cell_key(old)
                cell = self._cells.get(old_key)
                if cell is not None:
                    cell.pop(item_id, None)
                    if not cell:
                        del self._cells[old_key]
            self._locations[item_id] = p
            self._cells.setdefault(self._cell_key(p), {})[item_id] = p

    def query_radius(self, center: GeoPoint, radius_m: float) -> list[tuple[str, float]]:
        """All items within ``radius_m`` meters of ``center`` (boundary inclusive).

        Candidate cells are those intersecting the bounding box of the
        radius; each candidate is then exact-filtered by haversine distance.
        Returns (item_id, distance_m) pairs with unique ids.
        """
        if radius_m < 0:
            raise ValueError("radius must be non-negative")

        d_lat = math.degrees(radius_m / EARTH_RADIUS_M)
        lat_lo = max(center.lat - d_lat, -90.0)
        lat_hi = min(center.lat + d_lat, 90.0)
        # Longitude span widens toward the poles; cos of the extreme latitude bounds it.
        cos_lat = min(math.cos(math.radians(lat_lo)), math.cos(math.radians(lat_hi)))
        if cos_lat <= 1e-12:
            d_lon = 180.0
        else:
            d_lon = min(math.degrees(radius_m / (EARTH_RADIUS_M * cos_lat)), 180.0)
        lon_lo = max(center.lon - d_lon, -180.0)
        lon_hi = min(center.lon + d_lon, 180.0)

        row_lo = math.floor(lat_lo / self.cell_size_deg)
        row_hi = math.floor(lat_hi / self.cell_size_deg)
        col_lo = math.floor(lon_lo / self.cell_size_deg)
        col_hi = math.floor(lon_hi / self.cell_size_deg)

        results: list[tuple[str, float]] = []
        with self._lock:
            for row in range(row_lo, row_hi + 1):
                for col in range(col_lo, col_hi + 1):
                    cell = self._cells.get((row, col))
                    if not cell:
                        continue
                    for item_id, p in cell.items():
                        d = haversine_distance(center, p)
                        if d <= radius_m:
                            results.append((item_id, d))
        return results
