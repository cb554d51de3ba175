"""Offline reporting: per-use-case CSV stats plus rendered overview figures."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import ListedColormap

from .service import AriseService


def write_poi_stats_csv(service: AriseService, use_case: str, out_path: Path) -> Path:
    data = service.use_cases[use_case]
    with out_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["poi_id", "name", "lat", "lon", "review_count", "mean_sentiment", "importance"]
        )
        for s in sorted(data.stats, key=lambda s: s.poi_id):
            writer.writerow(
                [
                    s.poi_id,
                    s.name,
                    s.location.lat,
                    s.location.lon,
                    s.review_count,
                    f"{s.mean_sentiment:.6f}",
                    f"{s.importance:.6f}",
                ]
            )
    return out_path


def render_poi_figure(service: AriseService, use_case: str, out_path: Path) -> Path:
    data = service.use_cases[use_case]
    stats = sorted(data.stats, key=lambda s: (-s.review_count, s.poi_id))
    names = [s.name for s in stats]
    counts = [s.review_count for s in stats]
    sentiments = [s.mean_sentiment for s in stats]
    importances = [s.importance for s in stats]

    fig, axes = plt.subplots(1, 3, figsize=(14, 0.6 * max(len(stats), 4) + 2), sharey=True)
    y = np.arange(len(stats))

    axes[0].barh(y, counts, color="#4F6AF6")
    axes[0].set_title("reviews")
    axes[1].barh(y, sentiments, color=["#4ADE80" if s >= 0 else "#EF4444" for s in sentiments])
    axes[1].set_title("mean sentiment")
    axes[1].set_xlim(-1, 1)
    axes[2].barh(y, importances, color="#8B5CF6")
    axes[2].set_title("importance")
    axes[2].set_xlim(0, 1)
    axes[0].set_yticks(y, labels=names)
    axes[0].invert_yaxis()
    fig.suptitle(f"site stats: {use_case}")
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path


def render_scenario_figure(
    service: AriseService,
    use_case: str,
    out_path: Path,
    water_level: float | None,
    temp_delta: float,
) -> Path:
    data = service.use_cases[use_case]
    payload = service.simulate_payload(use_case, water_level, temp_delta)
    mask = np.array(payload["mask"], dtype=bool)
    coverage = np.array(payload["coverage"], dtype=float)
    elevations = data.heightmap.elevations
    summary = payload["summary"]

    fig, axes = plt.subplots(1, 3, figsize=(15, 5))

    im0 = axes[0].imshow(elevations, cmap="terrain")
    axes[0].set_title("elevation (m)")
    fig.colorbar(im0, ax=axes[0], shrink=0.8)
    seed_rows = [r for r, _ in data.config.flood_seeds]
    seed_cols = [c for _, c in data.config.flood_seeds]
    axes[0].scatter(seed_cols, seed_rows, marker="v", color="#1976d2", label="seeds")
    axes[0].legend(loc="upper right")

    axes[1].imshow(elevations, cmap="terrain", alpha=0.6)
    axes[1].imshow(
        np.ma.masked_where(~mask, mask), cmap=ListedColormap(["#0d47a1"]), alpha=0.9
    )
    level_label = "none" if water_level is None else f"{water_level:g} m"
    axes[1].set_title(
        f"inundation (level {level_label}): {summary['inundated_cell_count']} cells, "
        f"{summary['inundated_area_m2']:.0f} m$^2$"
    )

    im2 = axes[2].imshow(coverage, cmap="Greens", vmin=0, vmax=1)
    axes[2].set_title(
        f"vegetation (+{temp_delta:g} C): mean {summary['mean_coverage']:.3f}"
    )
    fig.colorbar(im2, ax=axes[2], shrink=0.8)

    for ax in axes:
        ax.set_xticks([])
        ax.set_yticks([])
    fig.suptitle(f"what-if scenario: {use_case}")
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path


def render_report(
    service: AriseService,
    use_case: str,
    out_dir: str | Path,
    water_level: float | None = None,
    temp_delta: float = 0.0,
) -> list[Path]:
    """Write the full report bundle; returns the created file paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    data = service.use_cases[use_case]
    if water_level is None:
        # default scenario: water a quarter of the way up the relief
        hm = data.heightmap
        water_level = hm.min_elevation() + 0.25 * (hm.max_elevation() - hm.min_elevation())
    return [
        write_poi_stats_csv(service, use_case, out_dir / f"{use_case}_poi_stats.csv"),
        render_poi_figure(service, use_case, out_dir / f"{use_case}_poi_overview.png"),
        render_scenario_figure(
            service, use_case, out_dir / f"{use_case}_scenario.png", water_level, temp_delta
        ),
    ]
