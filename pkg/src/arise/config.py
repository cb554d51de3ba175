"""Service configuration: a JSON file, relative paths resolved against it.

Every referenced input file must exist when the config loads; a broken
deployment should fail at startup, not at first request.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .reports import FlowVocabulary

ENV_CONFIG = "ARISE_CONFIG"

DEFAULT_LISTEN = "127.0.0.1:8000"
DEFAULT_ONSITE_RADIUS_M = 2000.0
DEFAULT_REFRESH_PERIOD_H = 24.0


class ConfigError(ValueError):
    pass


@dataclass
class UseCaseConfig:
    name: str
    poi_registry_path: Path
    review_fixture_path: Path
    heightmap_path: Path
    veg_base_path: Path
    flood_seeds: list[tuple[int, int]]


@dataclass
class ServiceConfig:
    data_dir: Path
    use_cases: list[UseCaseConfig]
    listen: str = DEFAULT_LISTEN
    onsite_radius_m: float = DEFAULT_ONSITE_RADIUS_M
    refresh_period_h: float = DEFAULT_REFRESH_PERIOD_H
    external_generator_url: str | None = None
    vocabulary: FlowVocabulary = field(default_factory=FlowVocabulary)

    @property
    def listen_host(self) -> str:
        return self.listen.rsplit(":", 1)[0]

    @property
    def listen_port(self) -> int:
        return int(self.listen.rsplit(":", 1)[1])

    def use_case(self, name: str) -> UseCaseConfig:
        for uc in self.use_cases:
            if uc.name == name:
                return uc
        raise KeyError(name)


def resolve_config_path(flag_value: str | None) -> Path:
    """ARISE_CONFIG wins over the --config flag when both are set."""
    env_value = os.environ.get(ENV_CONFIG)
    raw = env_value or flag_value
    if not raw:
        raise ConfigError("no config given: pass --config or set ARISE_CONFIG")
    return Path(raw)


def load_config(path: str | Path) -> ServiceConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {path}: {exc}") from exc

    base = path.parent

    def _resolve(p: str) -> Path:
        candidate = Path(p)
        return candidate if candidate.is_absolute() else (base / candidate)

    try:
        use_cases = []
        for uc in raw["use_cases"]:
            seeds = [(int(r), int(c)) for r, c in uc.get("flood_seeds", [])]
            use_cases.append(
                UseCaseConfig(
                    name=uc["name"],
                    poi_registry_path=_resolve(uc["poi_registry_path"]),
                    review_fixture_path=_resolve(uc["review_fixture_path"]),
                    heightmap_path=_resolve(uc["heightmap_path"]),
                    veg_base_path=_resolve(uc["veg_base_path"]),
                    flood_seeds=seeds,
                )
            )
        vocab_raw = raw.get("vocabulary", {})
        vocabulary = FlowVocabulary(
            measurement_types=tuple(
                vocab_raw.get("measurement_types", FlowVocabulary().measurement_types)
            ),
            impact_indicators=tuple(
                vocab_raw.get("impact_indicators", FlowVocabulary().impact_indicators)
            ),
        )
        config = ServiceConfig(
            data_dir=_resolve(raw["data_dir"]),
            use_cases=use_cases,
            listen=raw.get("listen", DEFAULT_LISTEN),
            onsite_radius_m=float(raw.get("onsite_radius_m", DEFAULT_ONSITE_RADIUS_M)),
            refresh_period_h=float(raw.get("refresh_period_h", DEFAULT_REFRESH_PERIOD_H)),
            external_generator_url=raw.get("external_generator_url"),
            vocabulary=vocabulary,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad config {path}: {exc}") from exc

    _validate_paths(config)
    return config


def _validate_paths(config: ServiceConfig) -> None:
    missing = []
    for uc in config.use_cases:
        for p in (
            uc.poi_registry_path,
            uc.review_fixture_path,
            uc.heightmap_path,
            uc.veg_base_path,
        ):
            if not p.is_file():
                missing.append(str(p))
    if missing:
        raise ConfigError("missing referenced files: " + ", ".join(missing))
    # data_dir is output, created on demand
    config.data_dir.mkdir(parents=True, exist_ok=True)
