"""Sentiment-conditioned artwork generation and the per-use-case gallery.

The prompt carries one of four style descriptors picked by sentiment band;
regeneration is keyed on (poi_id, band) so small sentiment drift does not
churn images. The built-in generator renders a deterministic 512x512 PNG
(band gradient plus seeded value noise); an external HTTP backend can be
plugged in and is fallen back from transparently when unreachable.
"""

from __future__ import annotations

import base64
import hashlib
import io
import logging
import threading
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Mapping, Protocol, Sequence

import httpx
import numpy as np
from PIL import Image

from .reviews import PoiStats, top_k_by_reviews

log = logging.getLogger(__name__)

IMAGE_SIZE = 512
EXTERNAL_TIMEOUT_S = 30.0


class GenerationError(RuntimeError):
    """The configured generator could not produce a usable image."""


@dataclass(frozen=True)
class SentimentBand:
    key: str
    descriptor: str
    lower: float  # inclusive lower bound; band is [lower, next.lower)


# Ordered from most negative to most positive; lookup walks from the top.
BANDS = (
    SentimentBand("stormy", "dark, stormy expressionist", float("-inf")),
    SentimentBand("muted", "muted, melancholic tones", -0.5),
    SentimentBand("calm", "serene, soft watercolor", 0.0),
    SentimentBand("bright", "vibrant, luminous, joyful impressionist", 0.5),
)

# Top/bottom gradient colors per band key.
BAND_COLORS: dict[str, tuple[tuple[int, int, int], tuple[int, int, int]]] = {
    "bright": ((255, 196, 64), (226, 76, 90)),
    "calm": ((168, 216, 234), (199, 227, 183)),
    "muted": ((124, 110, 135), (94, 80, 72)),
    "stormy": ((28, 32, 48), (52, 78, 92)),
}


def sentiment_band(sentiment: float) -> SentimentBand:
    for band in reversed(BANDS):
        if sentiment >= band.lower:
            return band
    return BANDS[0]


@dataclass(frozen=True)
class ArtPrompt:
    poi_id: str
    base_photo: str
    sentiment: float
    prompt_text: str
    seed: int  # 64-bit unsigned, stable hash of (poi_id, prompt_text)


@dataclass(frozen=True)
class Artwork:
    id: str
    poi_id: str
    prompt: ArtPrompt
    image: bytes
    generator: str  # "procedural" | "external"
    generated_at: datetime

    def __post_init__(self):
        _validate_png(self.image)


def _validate_png(data: bytes) -> None:
    try:
        with Image.open(io.BytesIO(data)) as img:
            if img.format != "PNG":
                raise GenerationError(f"image is {img.format}, not PNG")
            if img.size != (IMAGE_SIZE, IMAGE_SIZE):
                raise GenerationError(f"image is {img.size}, expected {IMAGE_SIZE}x{IMAGE_SIZE}")
    except GenerationError:
        raise
    except Exception as exc:
        raise GenerationError(f"image does not parse as PNG: {exc}") from exc


def stable_seed(poi_id: str, prompt_text: str) -> int:
    digest = hashlib.sha256(f"{poi_id}\x1f{prompt_text}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def build_prompt(poi: PoiStats, photo: str | Path) -> ArtPrompt:
    """Compose the generation prompt for a site from its current sentiment."""
    photo = Path(photo)
    if not photo.is_file():
        raise FileNotFoundError(f"base photo not found: {photo}")
    band = sentiment_band(poi.mean_sentiment)
    prompt_text = f"{poi.name}, {band.descriptor}, painting"
    return ArtPrompt(
        poi_id=poi.poi_id,
        base_photo=str(photo),
        sentiment=poi.mean_sentiment,
        prompt_text=prompt_text,
        seed=stable_seed(poi.poi_id, prompt_text),
    )


class GeneratorAdapter(Protocol):
    name: str

    def render(self, prompt: ArtPrompt) -> bytes: ...


def _value_noise(rng: np.random.Generator, size: int) -> np.ndarray:
    """Multi-octave value noise in [0, 1]: bilinearly upsampled random lattices."""
    total = np.zeros((size, size))
    weight_sum = 0.0
    weight = 1.0
    for lattice_n in (5, 9, 17, 33):
        lattice = rng.random((lattice_n, lattice_n))
        total += weight * _bilinear_upsample(lattice, size)
        weight_sum += weight
        weight *= 0.5
    return total / weight_sum


def _bilinear_upsample(lattice: np.ndarray, size: int) -> np.ndarray:
    n = lattice.shape[0]
    xs = np.linspace(0.0, n - 1.0, size)
    i0 = np.floor(xs).astype(int)
    i1 = np.minimum(i0 + 1, n - 1)
    frac = xs - i0
    rows = lattice[i0, :] * (1.0 - frac)[:, None] + lattice[i1, :] * frac[:, None]
    cols = rows[:, i0] * (1.0 - frac)[None, :] + rows[:, i1] * frac[None, :]
    return cols


class ProceduralGenerator:
    """Deterministic renderer: band gradient modulated by seeded value noise.

    A pure function of the prompt — identical prompts give byte-identical
    PNGs.
    """

    name = "procedural"

    def render(self, prompt: ArtPrompt) -> bytes:
        band = sentiment_band(prompt.sentiment)
        top, bottom = BAND_COLORS[band.key]
        t = np.linspace(0.0, 1.0, IMAGE_SIZE)[:, None]
        gradient = (1.0 - t) * np.array(top, dtype=float) + t * np.array(bottom, dtype=float)

        rng = np.random.default_rng(prompt.seed)
        noise = _value_noise(rng, IMAGE_SIZE)
        pixels = gradient[:, None, :] * (0.65 + 0.45 * noise[:, :, None])
        img = Image.fromarray(np.clip(pixels, 0, 255).astype(np.uint8), mode="RGB")
        buf = io.BytesIO()
        img.save(buf, format="PNG")
        return buf.getvalue()


class ExternalGenerator:
    """HTTP backend adapter: POSTs the prompt, expects raw PNG bytes back."""

    name = "external"

    def __init__(self, url: str, timeout_s: float = EXTERNAL_TIMEOUT_S):
        self.url = url
        self.timeout_s = timeout_s

    def render(self, prompt: ArtPrompt) -> bytes:
        payload = {
            "prompt_text": prompt.prompt_text,
            "seed": prompt.seed,
            "base_photo_b64": base64.b64encode(Path(prompt.base_photo).read_bytes()).decode(
                "ascii"
            ),
        }
        try:
            response = httpx.post(self.url, json=payload, timeout=self.timeout_s)
            response.raise_for_status()
        except httpx.HTTPError as exc:
            raise GenerationError(f"external generator failed: {exc}") from exc
        return response.content


def generate(
    prompt: ArtPrompt,
    adapter: GeneratorAdapter | None = None,
    clock: Callable[[], datetime] | None = None,
) -> Artwork:
    """Produce an Artwork; external failures fall back to the procedural path."""
    now = clock or (lambda: datetime.now(timezone.utc))
    procedural = ProceduralGenerator()
    adapter = adapter or procedural

    generator_name = adapter.name
    try:
        image = adapter.render(prompt)
        _validate_png(image)
    except GenerationError as exc:
        if adapter is procedural:
            raise
        log.warning("generator %r failed (%s); falling back to procedural", adapter.name, exc)
        image = procedural.render(prompt)
        generator_name = procedural.name

    return Artwork(
        id=uuid.uuid4().hex,
        poi_id=prompt.poi_id,
        prompt=prompt,
        image=image,
        generator=generator_name,
        generated_at=now(),
    )


@dataclass
class GalleryDelta:
    created: list[Artwork]
    retained: list[Artwork]


class Gallery:
    """Artwork bookkeeping keyed by (poi_id, sentiment band).

    The served view is always derived from the current stats: the top five
    most-reviewed sites, each showing its artwork for the current band.
    History stays in the key map but is never served. One refresh runs per
    use case at a time.
    """

    def __init__(
        self,
        adapter: GeneratorAdapter | None = None,
        persist_hook: Callable[[str, Artwork], None] | None = None,
        clock: Callable[[], datetime] | None = None,
        top_k: int = 5,
    ):
        self.adapter = adapter
        self.persist_hook = persist_hook
        self.clock = clock
        self.top_k = top_k
        self._by_key: dict[tuple[str, str], Artwork] = {}
        self._use_case_locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _lock_for(self, use_case: str) -> threading.Lock:
        with self._registry_lock:
            return self._use_case_locks.setdefault(use_case, threading.Lock())

    def restore(self, artwork: Artwork) -> None:
        """Re-register a previously persisted artwork (startup replay)."""
        band = sentiment_band(artwork.prompt.sentiment)
        self._by_key[(artwork.poi_id, band.key)] = artwork

    def refresh(
        self,
        use_case: str,
        stats: Sequence[PoiStats],
        photo_by_poi: Mapping[str, str],
    ) -> GalleryDelta:
        """Generate artworks for top sites whose (poi, band) has none yet."""
        with self._lock_for(use_case):
            created: list[Artwork] = []
            retained: list[Artwork] = []
            for poi in top_k_by_reviews(stats, self.top_k):
                band = sentiment_band(poi.mean_sentiment)
                key = (poi.poi_id, band.key)
                artwork = self._by_key.get(key)
                if artwork is None:
                    prompt = build_prompt(poi, photo_by_poi[poi.poi_id])
                    artwork = generate(prompt, self.adapter, clock=self.clock)
                    self._by_key[key] = artwork
                    if self.persist_hook is not None:
                        self.persist_hook(use_case, artwork)
                    created.append(artwork)
                else:
                    retained.append(artwork)
            return GalleryDelta(created=created, retained=retained)

    def current(self, stats: Sequence[PoiStats]) -> list[Artwork]:
        """The artworks a client sees right now for these stats (at most top_k)."""
        out = []
        for poi in top_k_by_reviews(stats, self.top_k):
            band = sentiment_band(poi.mean_sentiment)
            artwork = self._by_key.get((poi.poi_id, band.key))
            if artwork is not None:
                out.append(artwork)
        return out
