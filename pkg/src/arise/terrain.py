"""Heightmap grids, terrain meshes and the climate what-if kernel.

The what-if model is deliberately small and explicit: seeded flood fill
for water level, a linear temperature penalty plus total loss under water
for vegetation. Outputs are illustrative, not hydrodynamic forecasts.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

# Vegetation response defaults: coverage lost per degree of warming, and
# the (total) loss applied to inundated cells.
TEMP_PENALTY_PER_DEG = 0.05
INUNDATION_PENALTY = 1.0

# Water level meaning "no water anywhere".
NO_WATER = float("-inf")


class HeightMapError(ValueError):
    """Raised for malformed heightmap files."""


@dataclass
class HeightMap:
    nrows: int
    ncols: int
    cell_size: float
    nodata: float
    elevations: np.ndarray  # (nrows, ncols) float64; nodata cells hold the sentinel

    def __post_init__(self):
        self.elevations = np.asarray(self.elevations, dtype=float)
        if self.elevations.shape != (self.nrows, self.ncols):
            raise HeightMapError(
                f"elevation grid shape {self.elevations.shape} does not match "
                f"declared {self.nrows}x{self.ncols}"
            )
        if not self.valid_mask().any():
            raise HeightMapError("heightmap has no valid (non-nodata) cells")

    def valid_mask(self) -> np.ndarray:
        return self.elevations != self.nodata

    def min_elevation(self) -> float:
        return float(self.elevations[self.valid_mask()].min())

    def max_elevation(self) -> float:
        return float(self.elevations[self.valid_mask()].max())


@dataclass
class IndicatorState:
    """The three adjustable climate indicators for one area."""

    water_level: float = NO_WATER  # absolute elevation of the water surface, m
    temp_delta: float = 0.0  # degrees C relative to baseline
    veg_base: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))

    def __post_init__(self):
        self.veg_base = np.asarray(self.veg_base, dtype=float)
        if self.veg_base.size and (self.veg_base.min() < 0.0 or self.veg_base.max() > 1.0):
            raise ValueError("vegetation coverage values must lie within [0, 1]")


@dataclass
class TerrainMesh:
    vertices: list[tuple[float, float, float]]
    triangles: list[tuple[int, int, int]]


@dataclass
class ScenarioResult:
    mask: np.ndarray  # bool (nrows, ncols)
    coverage: np.ndarray  # float (nrows, ncols)
    inundated_cell_count: int
    inundated_area_m2: float
    mean_coverage: float


def load_heightmap(path: str | Path) -> HeightMap:
    """Parse an ASCII grid file.

    Expected layout: a header line ``ncols <n> nrows <n> cellsize <m>
    nodata <v>`` followed by ``nrows`` whitespace-separated rows of
    ``ncols`` values each.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse_heightmap(text, source=str(path))


def parse_heightmap(text: str, source: str = "<string>") -> HeightMap:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise HeightMapError(f"{source}: empty heightmap file")

    header = lines[0].split()
    if len(header) != 8 or [w.lower() for w in header[::2]] != ["ncols", "nrows", "cellsize", "nodata"]:
        raise HeightMapError(
            f"{source}: header must be 'ncols <n> nrows <n> cellsize <m> nodata <v>', got {lines[0]!r}"
        )
    try:
        ncols = int(header[1])
        nrows = int(header[3])
        cell_size = float(header[5])
        nodata = float(header[7])
    except ValueError as exc:
        raise HeightMapError(f"{source}: non-numeric header value: {exc}") from exc
    if nrows <= 0 or ncols <= 0:
        raise HeightMapError(f"{source}: grid dimensions must be positive, got {nrows}x{ncols}")
    if cell_size <= 0:
        raise HeightMapError(f"{source}: cellsize must be positive, got {cell_size}")

    body = lines[1:]
    if len(body) != nrows:
        raise HeightMapError(f"{source}: expected {nrows} data rows, found {len(body)}")

    grid = np.empty((nrows, ncols), dtype=float)
    for r, line in enumerate(body):
        values = line.split()
        if len(values) != ncols:
            raise HeightMapError(f"{source}: row {r} has {len(values)} values, expected {ncols}")
        for c, token in enumerate(values):
            try:
                grid[r, c] = float(token)
            except ValueError:
                raise HeightMapError(
                    f"{source}: non-numeric cell at row {r}, col {c}: {token!r}"
                ) from None
    return HeightMap(nrows=nrows, ncols=ncols, cell_size=cell_size, nodata=nodata, elevations=grid)


def save_heightmap(hm: HeightMap, path: str | Path) -> None:
    """Write the grid back in the ASCII format; floats keep full precision."""
    lines = [f"ncols {hm.ncols} nrows {hm.nrows} cellsize {hm.cell_size!r} nodata {hm.nodata!r}"]
    for row in hm.elevations:
        lines.append(" ".join(repr(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def mesh_from_heightmap(hm: HeightMap, vertical_exaggeration: float = 1.0) -> TerrainMesh:
    """Triangulate the grid into a mesh, two CCW triangles per cell.

    Vertex (row, col) sits at (col*cell_size, row*cell_size, z*exaggeration).
    Nodata cells take the minimum valid elevation so the surface stays closed.
    """
    if vertical_exaggeration <= 0:
        raise ValueError("vertical_exaggeration must be positive")
    floor = hm.min_elevation()
    z = np.where(hm.valid_mask(), hm.elevations, floor) * vertical_exaggeration

    cs = hm.cell_size
    vertices = [
        (c * cs, r * cs, float(z[r, c]))
        for r in range(hm.nrows)
        for c in range(hm.ncols)
    ]

    triangles: list[tuple[int, int, int]] = []
    for r in range(hm.nrows - 1):
        for c in range(hm.ncols - 1):
            v00 = r * hm.ncols + c
            v01 = v00 + 1
            v10 = v00 + hm.ncols
            v11 = v10 + 1
            # Counter-clockwise seen from +z (x right, y toward growing rows).
            triangles.append((v00, v01, v11))
            triangles.append((v00, v11, v10))
    return TerrainMesh(vertices=vertices, triangles=triangles)


def write_mesh_obj(mesh: TerrainMesh, path: str | Path) -> None:
    """Export as Wavefront-style text: 'v x y z' lines then 1-based 'f i j k'."""
    lines = [f"v {x:g} {y:g} {z:g}" for x, y, z in mesh.vertices]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.triangles]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def flood_extent(
    hm: HeightMap, water_level: float, seeds: list[tuple[int, int]]
) -> np.ndarray:
    """Boolean inundation mask: cells reachable from a seed at or below the level.

    Breadth-first over 4-connected neighbors; a cell joins the flood iff
    its elevation is <= water_level (seeds included — a seed above the
    level stays dry). Nodata cells block the fill.
    """
    mask = np.zeros((hm.nrows, hm.ncols), dtype=bool)
    valid = hm.valid_mask()
    under = valid & (hm.elevations <= water_level)

    queue: deque[tuple[int, int]] = deque()
    for r, c in seeds:
        if not (0 <= r < hm.nrows and 0 <= c < hm.ncols):
            raise ValueError(f"seed ({r}, {c}) outside {hm.nrows}x{hm.ncols} grid")
        if under[r, c] and not mask[r, c]:
            mask[r, c] = True
            queue.append((r, c))

    while queue:
        r, c = queue.popleft()
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            nr, nc = r + dr, c + dc
            if 0 <= nr < hm.nrows and 0 <= nc < hm.ncols and under[nr, nc] and not mask[nr, nc]:
                mask[nr, nc] = True
                queue.append((nr, nc))
    return mask


def vegetation_response(state: IndicatorState, mask: np.ndarray) -> np.ndarray:
    """Coverage after applying warming and inundation penalties, clamped to [0, 1].

    Cooling gives no coverage gain: only positive temp_delta penalizes.
    """
    if state.veg_base.shape != mask.shape:
        raise ValueError(
            f"vegetation grid {state.veg_base.shape} does not match mask {mask.shape}"
        )
    coverage = (
        state.veg_base
        - TEMP_PENALTY_PER_DEG * max(state.temp_delta, 0.0)
        - INUNDATION_PENALTY * mask.astype(float)
    )
    return np.clip(coverage, 0.0, 1.0)


def simulate(
    hm: HeightMap, state: IndicatorState, seeds: list[tuple[int, int]]
) -> ScenarioResult:
    """Run one what-if scenario: flood fill, then vegetation response."""
    mask = flood_extent(hm, state.water_level, seeds)
    coverage = vegetation_response(state, mask)
    count = int(mask.sum())
    return ScenarioResult(
        mask=mask,
        coverage=coverage,
        inundated_cell_count=count,
        inundated_area_m2=count * hm.cell_size**2,
        mean_coverage=float(coverage.mean()),
    )
