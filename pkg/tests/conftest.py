import json
from pathlib import Path

import pytest

from arise.config import load_config
from arise.service import AriseService

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures" / "demo"


def write_demo_config(tmp_path: Path, **overrides) -> Path:
    """A config pointing at the shipped demo fixtures with a private data_dir."""
    cfg = {
        "listen": "127.0.0.1:8641",
        "data_dir": str(tmp_path / "data"),
        "onsite_radius_m": 2000,
        "refresh_period_h": 24,
        "use_cases": [
            {
                "name": "demo",
                "poi_registry_path": str(FIXTURES / "pois.json"),
                "review_fixture_path": str(FIXTURES / "reviews.jsonl"),
                "heightmap_path": str(FIXTURES / "heightmap.asc"),
                "veg_base_path": str(FIXTURES / "veg_base.asc"),
                "flood_seeds": [[6, 0], [6, 1]],
            }
        ],
    }
    cfg.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg, indent=2))
    return path


@pytest.fixture
def demo_config_path(tmp_path):
    return write_demo_config(tmp_path)


@pytest.fixture
def demo_service(demo_config_path):
    return AriseService(load_config(demo_config_path))
