"""The deployable service: configuration, state, persistence and the
operations every endpoint delegates to.

Endpoints hold no logic of their own — each one calls a method here, and
each method is a thin composition of the domain modules over stored
state, so module-level and endpoint-level results always agree.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import artworks, gamify, reports, reviews, terrain
from .config import ServiceConfig, UseCaseConfig
from .geo import GeoPoint, SpatialIndex
from .store import JsonlStore

log = logging.getLogger(__name__)


class NotFoundError(KeyError):
    pass


class ValidationError(ValueError):
    pass


@dataclass
class UseCaseData:
    config: UseCaseConfig
    pois: list[reviews.PoiRecord]
    stats: list[reviews.PoiStats]
    skipped: int
    n_max: int
    heightmap: terrain.HeightMap
    veg_base: np.ndarray


class AriseService:
    def __init__(self, config: ServiceConfig, generator_adapter=None):
        self.config = config
        self.store = JsonlStore(config.data_dir)
        self.lexicon = reviews.load_lexicon()

        if generator_adapter is None and config.external_generator_url:
            generator_adapter = artworks.ExternalGenerator(config.external_generator_url)
        self.gallery = artworks.Gallery(
            adapter=generator_adapter, persist_hook=self._persist_artwork
        )

        self.reports: dict[str, reports.HazardReport] = {}
        self.report_index = SpatialIndex()
        self.chat = reports.ChatEngine(
            submit_hook=self._persist_report, vocabulary=config.vocabulary
        )

        self.ledger = gamify.RewardLedger()

        self.use_cases: dict[str, UseCaseData] = {}
        self.poi_index = SpatialIndex()
        for uc in config.use_cases:
            self.use_cases[uc.name] = self._load_use_case(uc)

        self._artwork_images: dict[str, bytes] = {}
        self._artwork_meta: dict[str, dict] = {}
        self._replay()
        self._scheduler_stop: threading.Event | None = None

    # -- loading and replay ------------------------------------------------

    def _load_use_case(self, uc: UseCaseConfig) -> UseCaseData:
        pois = reviews.load_poi_registry(uc.poi_registry_path)
        pois = [p for p in pois if p.use_case == uc.name]
        hm = terrain.load_heightmap(uc.heightmap_path)
        veg = terrain.load_heightmap(uc.veg_base_path).elevations
        if veg.shape != hm.elevations.shape:
            raise ValueError(
                f"use case {uc.name}: vegetation grid {veg.shape} does not match "
                f"heightmap {hm.elevations.shape}"
            )
        if veg.min() < 0.0 or veg.max() > 1.0:
            raise ValueError(f"use case {uc.name}: vegetation coverage outside [0, 1]")
        for r, c in uc.flood_seeds:
            if not (0 <= r < hm.nrows and 0 <= c < hm.ncols):
                raise ValueError(f"use case {uc.name}: flood seed ({r}, {c}) out of bounds")

        data = UseCaseData(
            config=uc, pois=pois, stats=[], skipped=0, n_max=0, heightmap=hm, veg_base=veg
        )
        self._recompute_stats(data)
        for poi in pois:
            self.poi_index.insert(poi.poi_id, poi.location)
        return data

    def _recompute_stats(self, data: UseCaseData) -> None:
        source = reviews.FixtureReviewSource(
            data.config.review_fixture_path, {p.poi_id for p in data.pois}
        )
        result = reviews.ingest_reviews(source, data.config.name)
        counts: dict[str, int] = {}
        for review in result.reviews:
            counts[review.poi_id] = counts.get(review.poi_id, 0) + 1
        data.n_max = max(counts.values(), default=0)
        data.stats = [
            reviews.aggregate_poi(poi, result.reviews, self.lexicon, data.n_max)
            for poi in data.pois
        ]
        data.skipped = result.skipped
        if result.skipped:
            log.warning(
                "use case %s: skipped %d malformed review records", data.config.name, result.skipped
            )

    def _replay(self) -> None:
        for record in self.store.read_all("reports"):
            report = reports.report_from_payload(record)
            self.reports[report.id] = report
            self.report_index.insert(report.id, report.location)
        for record in self.store.read_all("events"):
            self.ledger.record_event(record["user_id"], record["event_type"])
        for record in self.store.read_all("artworks"):
            image = self.store.read_blob(record["image_file"])
            artwork = artworks.Artwork(
                id=record["id"],
                poi_id=record["poi_id"],
                prompt=artworks.ArtPrompt(**record["prompt"]),
                image=image,
                generator=record["generator"],
                generated_at=datetime.fromisoformat(record["generated_at"]),
            )
            self.gallery.restore(artwork)
            self._artwork_images[artwork.id] = artwork.image
            self._artwork_meta[artwork.id] = record

    # -- persistence hooks ---------------------------------------------------

    def _persist_report(self, report: reports.HazardReport) -> None:
        self.store.append("reports", reports.report_to_payload(report))
        self.reports[report.id] = report
        self.report_index.insert(report.id, report.location)

    def _persist_artwork(self, use_case: str, artwork: artworks.Artwork) -> None:
        image_file = f"artworks/{artwork.id}.png"
        self.store.write_blob(image_file, artwork.image)
        record = {
            "id": artwork.id,
            "use_case": use_case,
            "poi_id": artwork.poi_id,
            "generator": artwork.generator,
            "generated_at": artwork.generated_at.isoformat(),
            "image_file": image_file,
            "prompt": {
                "poi_id": artwork.prompt.poi_id,
                "base_photo": artwork.prompt.base_photo,
                "sentiment": artwork.prompt.sentiment,
                "prompt_text": artwork.prompt.prompt_text,
                "seed": artwork.prompt.seed,
            },
        }
        self.store.append("artworks", record)
        self._artwork_images[artwork.id] = artwork.image
        self._artwork_meta[artwork.id] = record

    # -- helpers -------------------------------------------------------------

    def _use_case(self, name: str) -> UseCaseData:
        try:
            return self.use_cases[name]
        except KeyError:
            raise NotFoundError(f"unknown use case {name!r}") from None

    @staticmethod
    def _center(lat: float, lon: float) -> GeoPoint:
        try:
            return GeoPoint(lat=lat, lon=lon)
        except ValueError as exc:
            raise ValidationError(str(exc)) from None

    # -- operations ------------------------------------------------------

    def ingest(self, use_case: str) -> dict:
        """Recompute a use case's stats from its fixture sources and persist
        the derived snapshot. Idempotent: same sources give same stats."""
        data = self._use_case(use_case)
        self._recompute_stats(data)
        snapshot = {
            "use_case": use_case,
            "n_max": data.n_max,
            "skipped_records": data.skipped,
            "pois": [self._poi_payload(s) for s in data.stats],
        }
        self.store.write_snapshot(f"poi_stats/{use_case}.json", snapshot)
        return snapshot

    @staticmethod
    def _poi_payload(stats: reviews.PoiStats, distance_m: float | None = None) -> dict:
        payload = {
            "poi_id": stats.poi_id,
            "name": stats.name,
            "location": {"lat": stats.location.lat, "lon": stats.location.lon},
            "review_count": stats.review_count,
            "mean_sentiment": stats.mean_sentiment,
            "importance": stats.importance,
        }
        if distance_m is not None:
            payload["distance_m"] = distance_m
        return payload

    def onsite_reports(self, lat: float, lon: float, radius_m: float | None = None) -> list[dict]:
        center = self._center(lat, lon)
        if radius_m is None:
            radius_m = self.config.onsite_radius_m
        if radius_m < 0:
            raise ValidationError("radius_m must be non-negative")
        hits = sorted(self.report_index.query_radius(center, radius_m), key=lambda h: (h[1], h[0]))
        out = []
        for report_id, distance in hits:
            report = self.reports[report_id]
            out.append(
                {
                    "id": report.id,
                    "hazard_type": report.hazard_type.value,
                    "description": report.description,
                    "distance_m": distance,
                    "location": {"lat": report.location.lat, "lon": report.location.lon},
                    "media": [{"kind": m.kind.value, "uri": m.uri} for m in report.media],
                    "created_at": report.created_at.isoformat(),
                }
            )
        return out

    def onsite_pois(self, lat: float, lon: float, radius_m: float | None = None) -> list[dict]:
        center = self._center(lat, lon)
        if radius_m is None:
            radius_m = self.config.onsite_radius_m
        if radius_m < 0:
            raise ValidationError("radius_m must be non-negative")
        stats_by_id = {
            s.poi_id: s for data in self.use_cases.values() for s in data.stats
        }
        hits = sorted(self.poi_index.query_radius(center, radius_m), key=lambda h: (h[1], h[0]))
        return [
            self._poi_payload(stats_by_id[poi_id], distance_m=distance)
            for poi_id, distance in hits
            if poi_id in stats_by_id
        ]

    def terrain_payload(self, use_case: str, vertical_exaggeration: float = 1.0) -> dict:
        data = self._use_case(use_case)
        mesh = terrain.mesh_from_heightmap(data.heightmap, vertical_exaggeration)
        hm = data.heightmap
        return {
            "use_case": use_case,
            "mesh": {
                "vertices": [list(v) for v in mesh.vertices],
                "triangles": [list(t) for t in mesh.triangles],
            },
            "baseline": {
                "water_level": None,  # null = no water anywhere
                "temp_delta": 0.0,
                "veg_base": data.veg_base.tolist(),
            },
            "grid": {
                "nrows": hm.nrows,
                "ncols": hm.ncols,
                "cell_size": hm.cell_size,
                "nodata": hm.nodata,
                "elevations": hm.elevations.tolist(),
                "min_elevation": hm.min_elevation(),
                "max_elevation": hm.max_elevation(),
            },
            "flood_seeds": [list(s) for s in data.config.flood_seeds],
        }

    def simulate_payload(
        self, use_case: str, water_level: float | None, temp_delta: float
    ) -> dict:
        data = self._use_case(use_case)
        level = terrain.NO_WATER if water_level is None else float(water_level)
        state = terrain.IndicatorState(
            water_level=level, temp_delta=float(temp_delta), veg_base=data.veg_base
        )
        result = terrain.simulate(data.heightmap, state, data.config.flood_seeds)
        return {
            "mask": result.mask.tolist(),
            "coverage": result.coverage.tolist(),
            "summary": {
                "inundated_cell_count": result.inundated_cell_count,
                "inundated_area_m2": result.inundated_area_m2,
                "mean_coverage": result.mean_coverage,
            },
        }

    def refresh_gallery(self, use_case: str) -> artworks.GalleryDelta:
        data = self._use_case(use_case)
        photo_by_poi = {p.poi_id: p.photo_path for p in data.pois}
        return self.gallery.refresh(use_case, data.stats, photo_by_poi)

    def gallery_payload(self, use_case: str) -> list[dict]:
        data = self._use_case(use_case)
        return [
            {
                "artwork_id": art.id,
                "poi_id": art.poi_id,
                "prompt_text": art.prompt.prompt_text,
                "image_url": f"/offsite/artworks/{art.id}.png",
                "generated_at": art.generated_at.isoformat(),
            }
            for art in self.gallery.current(data.stats)
        ]

    def artwork_image(self, artwork_id: str) -> bytes:
        try:
            return self._artwork_images[artwork_id]
        except KeyError:
            raise NotFoundError(f"unknown artwork {artwork_id!r}") from None

    def record_event(self, user_id: str, event_type: str) -> dict:
        if not user_id:
            raise ValidationError("user_id must be non-empty")
        try:
            profile = self.ledger.record_event(user_id, event_type)
        except ValueError as exc:
            raise ValidationError(str(exc)) from None
        self.store.append(
            "events",
            {
                "user_id": user_id,
                "event_type": event_type,
                "ts": datetime.now(timezone.utc).isoformat(),
            },
        )
        return profile.to_payload()

    def profile_payload(self, user_id: str) -> dict:
        return self.ledger.profile(user_id).to_payload()

    def handle_chat(self, payload: dict) -> dict:
        msg = reports.ChatMessage.from_payload(payload)
        return self.chat.handle(msg).to_payload()

    # -- background refresh ----------------------------------------------

    def start_gallery_scheduler(self) -> None:
        """Refresh every use case's gallery on the configured period."""
        if self._scheduler_stop is not None:
            return
        stop = threading.Event()
        period_s = self.config.refresh_period_h * 3600.0

        def _loop():
            while not stop.wait(period_s):
                for name in self.use_cases:
                    try:
                        delta = self.refresh_gallery(name)
                        log.info(
                            "gallery refresh %s: %d created, %d retained",
                            name, len(delta.created), len(delta.retained),
                        )
                    except Exception:
                        log.exception("gallery refresh failed for %s", name)

        thread = threading.Thread(target=_loop, name="gallery-refresh", daemon=True)
        thread.start()
        self._scheduler_stop = stop

    def stop_gallery_scheduler(self) -> None:
        if self._scheduler_stop is not None:
            self._scheduler_stop.set()
            self._scheduler_stop = None
