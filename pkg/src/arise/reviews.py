"""Review ingestion and per-site scoring.

Sentiment is a transparent lexicon lookup rather than a learned model, so
every score is reproducible and auditable. The importance score blends a
site's mean sentiment with its (log-damped) review volume, normalized so
each use case's busiest site anchors the scale.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Iterable, Protocol

from .geo import GeoPoint

DEFAULT_NEGATORS = frozenset({"not", "no", "never"})

# Maximal runs of alphanumeric characters (unicode-aware, underscore excluded).
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


class IngestError(RuntimeError):
    """Raised when a review source cannot be read at all."""


@dataclass(frozen=True)
class Review:
    poi_id: str
    text: str
    rating: int | None  # carried through for future blending, unused by scoring
    created_at: datetime

    def __post_init__(self):
        if not self.poi_id:
            raise ValueError("poi_id must be non-empty")


@dataclass(frozen=True)
class PoiRecord:
    """One registry entry: a named, geolocated site within a use case."""

    poi_id: str
    name: str
    location: GeoPoint
    use_case: str
    photo_path: str


@dataclass(frozen=True)
class PoiStats:
    poi_id: str
    name: str
    location: GeoPoint
    review_count: int
    mean_sentiment: float
    importance: float


@dataclass
class Lexicon:
    entries: dict[str, float]
    negators: frozenset[str] = DEFAULT_NEGATORS

    def __post_init__(self):
        self.entries = {token.lower(): valence for token, valence in self.entries.items()}
        bad = {t: v for t, v in self.entries.items() if not -1.0 <= v <= 1.0}
        if bad:
            raise ValueError(f"lexicon valences outside [-1, 1]: {bad}")
        self.negators = frozenset(t.lower() for t in self.negators)


def load_lexicon(path: str | Path | None = None) -> Lexicon:
    """Load a token<TAB>valence lexicon file; default is the shipped English one."""
    if path is None:
        text = resources.files("arise.data").joinpath("lexicon.tsv").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    entries: dict[str, float] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"lexicon line {lineno}: expected 'token<TAB>valence', got {line!r}")
        entries[parts[0]] = float(parts[1])
    return Lexicon(entries=entries)


def tokenize(text: str) -> list[str]:
    return [t.lower() for t in _TOKEN_RE.findall(text)]


def analyze_sentiment(text: str, lex: Lexicon) -> float:
    """Score a text in [-1, 1]: mean valence of matched tokens, 0 if none match.

    A matched token's valence flips sign when the immediately preceding
    token is a negator ("not wonderful").
    """
    tokens = tokenize(text)
    total = 0.0
    matched = 0
    for i, token in enumerate(tokens):
        valence = lex.entries.get(token)
        if valence is None:
            continue
        if i > 0 and tokens[i - 1] in lex.negators:
            valence = -valence
        total += valence
        matched += 1
    if matched == 0:
        return 0.0
    return max(-1.0, min(1.0, total / matched))


def importance_score(mean_sentiment: float, n_reviews: int, n_max: int) -> float:
    """Relevance in [0, 1]: rescaled sentiment times log-damped review volume.

    n_max is the largest review count among the use case's sites; the log
    damping keeps one mega-reviewed site from flattening all others.
    """
    if n_reviews < 0 or n_max < 0:
        raise ValueError("review counts must be non-negative")
    if n_reviews > n_max:
        raise ValueError(f"n_reviews ({n_reviews}) exceeds n_max ({n_max})")
    if n_max == 0 or n_reviews == 0:
        return 0.0
    sentiment_factor = (mean_sentiment + 1.0) / 2.0
    volume_factor = math.log10(1 + n_reviews) / math.log10(1 + n_max)
    return sentiment_factor * volume_factor


def aggregate_poi(
    poi: PoiRecord, reviews: Iterable[Review], lex: Lexicon, n_max: int
) -> PoiStats:
    """Fold a site's reviews into its overlay stats."""
    scores = [analyze_sentiment(r.text, lex) for r in reviews if r.poi_id == poi.poi_id]
    count = len(scores)
    mean_sentiment = sum(scores) / count if count else 0.0
    return PoiStats(
        poi_id=poi.poi_id,
        name=poi.name,
        location=poi.location,
        review_count=count,
        mean_sentiment=mean_sentiment,
        importance=importance_score(mean_sentiment, count, n_max),
    )


def top_k_by_reviews(stats: Iterable[PoiStats], k: int = 5) -> list[PoiStats]:
    """Most-reviewed sites first; ties broken by ascending poi_id."""
    ranked = sorted(stats, key=lambda s: (-s.review_count, s.poi_id))
    return ranked[: max(k, 0)]


@dataclass
class IngestResult:
    reviews: list[Review]
    skipped: int = 0
    skip_reasons: list[str] = field(default_factory=list)


class ReviewSource(Protocol):
    def fetch(self, use_case: str) -> IngestResult: ...


def ingest_reviews(source: ReviewSource, use_case: str) -> IngestResult:
    """Pull all reviews for a use case's configured sites through the source."""
    return source.fetch(use_case)


class FixtureReviewSource:
    """Reads newline-delimited JSON review records from a fixture file.

    Each record: {"poi_id": str, "text": str, "rating": int|null,
    "created_at": RFC 3339 string}. Malformed records are skipped and
    counted; a missing file is a hard error naming the path.
    """

    def __init__(self, path: str | Path, valid_poi_ids: set[str]):
        self.path = Path(path)
        self.valid_poi_ids = set(valid_poi_ids)

    def fetch(self, use_case: str) -> IngestResult:
        if not self.path.exists():
            raise IngestError(f"review fixture not found: {self.path}")
        result = IngestResult(reviews=[])
        with self.path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    result.reviews.append(self._parse_record(line))
                except (ValueError, KeyError, TypeError) as exc:
                    result.skipped += 1
                    result.skip_reasons.append(f"{self.path.name}:{lineno}: {exc}")
        return result

    def _parse_record(self, line: str) -> Review:
        obj = json.loads(line)
        if not isinstance(obj, dict):
            raise ValueError("record is not a JSON object")
        poi_id = obj["poi_id"]
        if not isinstance(poi_id, str) or not poi_id:
            raise ValueError("poi_id must be a non-empty string")
        if poi_id not in self.valid_poi_ids:
            raise ValueError(f"unknown poi_id {poi_id!r}")
        text = obj["text"]
        if not isinstance(text, str):
            raise ValueError("text must be a string")
        rating = obj.get("rating")
        if rating is not None:
            if not isinstance(rating, int) or isinstance(rating, bool) or not 1 <= rating <= 5:
                raise ValueError(f"rating must be an integer in 1..5, got {rating!r}")
        created_at = parse_rfc3339(obj["created_at"])
        return Review(poi_id=poi_id, text=text, rating=rating, created_at=created_at)


def parse_rfc3339(value: str) -> datetime:
    if not isinstance(value, str):
        raise ValueError(f"created_at must be a string, got {value!r}")
    dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt


def load_poi_registry(path: str | Path) -> list[PoiRecord]:
    """Load the JSON registry of sites (poi_id, name, lat, lon, use_case, photo_path).

    Relative photo paths resolve against the registry file's directory.
    """
    path = Path(path)
    if not path.exists():
        raise IngestError(f"PoI registry not found: {path}")
    raw = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(raw, list):
        raise ValueError(f"{path}: registry must be a JSON list")
    records = []
    seen: set[str] = set()
    for entry in raw:
        poi_id = entry["poi_id"]
        if poi_id in seen:
            raise ValueError(f"{path}: duplicate poi_id {poi_id!r}")
        seen.add(poi_id)
        photo = Path(entry["photo_path"])
        if not photo.is_absolute():
            photo = path.parent / photo
        records.append(
            PoiRecord(
                poi_id=poi_id,
                name=entry["name"],
                location=GeoPoint(lat=float(entry["lat"]), lon=float(entry["lon"])),
                use_case=entry["use_case"],
                photo_path=str(photo),
            )
        )
    return records
