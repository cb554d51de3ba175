import hashlib
import io
import random

import pytest
from PIL import Image

from arise.artworks import (
    BANDS,
    ArtPrompt,
    ExternalGenerator,
    Gallery,
    GenerationError,
    ProceduralGenerator,
    build_prompt,
    generate,
    sentiment_band,
    stable_seed,
)
from arise.geo import GeoPoint
from arise.reviews import PoiStats


def stats(poi_id="poi_a", name="Site A", count=5, sentiment=0.7):
    return PoiStats(
        poi_id=poi_id,
        name=name,
        location=GeoPoint(45.0, 7.0),
        review_count=count,
        mean_sentiment=sentiment,
        importance=0.5,
    )


@pytest.fixture
def photo(tmp_path):
    path = tmp_path / "site.png"
    Image.new("RGB", (32, 32), (90, 120, 150)).save(path)
    return path


class TestBands:
    @pytest.mark.parametrize(
        "sentiment,key",
        [
            (0.9, "bright"), (0.5, "bright"),
            (0.49, "calm"), (0.0, "calm"),
            (-0.01, "muted"), (-0.5, "muted"),
            (-0.51, "stormy"), (-1.0, "stormy"),
        ],
    )
    def test_boundaries_inclusive_at_lower_bound(self, sentiment, key):
        assert sentiment_band(sentiment).key == key

    def test_descriptors(self):
        assert sentiment_band(0.9).descriptor == "vibrant, luminous, joyful impressionist"
        assert sentiment_band(0.2).descriptor == "serene, soft watercolor"
        assert sentiment_band(-0.2).descriptor == "muted, melancholic tones"
        assert sentiment_band(-0.8).descriptor == "dark, stormy expressionist"


class TestBuildPrompt:
    def test_text_contains_name_and_exactly_one_descriptor(self, photo):
        prompt = build_prompt(stats(sentiment=0.9), photo)
        assert prompt.prompt_text == "Site A, vibrant, luminous, joyful impressionist, painting"
        matches = [b for b in BANDS if b.descriptor in prompt.prompt_text]
        assert len(matches) == 1

    def test_deterministic_for_same_inputs(self, photo):
        a = build_prompt(stats(sentiment=0.42), photo)
        b = build_prompt(stats(sentiment=0.42), photo)
        assert a.prompt_text == b.prompt_text
        assert a.seed == b.seed

    def test_seed_is_stable_hash(self, photo):
        prompt = build_prompt(stats(), photo)
        assert prompt.seed == stable_seed("poi_a", prompt.prompt_text)
        assert 0 <= prompt.seed < 2**64

    def test_missing_photo_rejected(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            build_prompt(stats(), tmp_path / "absent.png")


def make_prompt(seed=1234, sentiment=0.7, photo="unused.png"):
    return ArtPrompt(
        poi_id="poi_a",
        base_photo=str(photo),
        sentiment=sentiment,
        prompt_text="Site A, serene, soft watercolor, painting",
        seed=seed,
    )


class TestProceduralGenerator:
    def test_byte_identical_for_identical_prompts(self):
        gen = ProceduralGenerator()
        prompt = make_prompt()
        assert gen.render(prompt) == gen.render(prompt)

    def test_output_is_512_png(self):
        image = ProceduralGenerator().render(make_prompt())
        with Image.open(io.BytesIO(image)) as img:
            assert img.format == "PNG"
            assert img.size == (512, 512)

    def test_differing_seeds_differ(self):
        gen = ProceduralGenerator()
        rng = random.Random(77)
        for _ in range(20):
            s1 = rng.getrandbits(64)
            s2 = rng.getrandbits(64)
            if s1 == s2:
                continue
            h1 = hashlib.sha256(gen.render(make_prompt(seed=s1))).hexdigest()
            h2 = hashlib.sha256(gen.render(make_prompt(seed=s2))).hexdigest()
            assert h1 != h2

    def test_band_changes_palette(self):
        gen = ProceduralGenerator()
        bright = gen.render(make_prompt(sentiment=0.9))
        stormy = gen.render(make_prompt(sentiment=-0.9))
        assert bright != stormy


class TestGenerate:
    def test_procedural_by_default(self):
        artwork = generate(make_prompt())
        assert artwork.generator == "procedural"
        assert artwork.poi_id == "poi_a"

    def test_unreachable_external_falls_back(self, tmp_path, caplog):
        photo = tmp_path / "p.png"
        Image.new("RGB", (8, 8)).save(photo)
        adapter = ExternalGenerator("http://127.0.0.1:9/never", timeout_s=0.2)
        with caplog.at_level("WARNING"):
            artwork = generate(make_prompt(photo=photo), adapter)
        assert artwork.generator == "procedural"
        assert any("falling back" in r.message for r in caplog.records)

    def test_bad_external_output_falls_back(self):
        class JunkAdapter:
            name = "external"

            def render(self, prompt):
                raise GenerationError("boom")

        artwork = generate(make_prompt(), JunkAdapter())
        assert artwork.generator == "procedural"


class TestGallery:
    def five_stats(self, sentiments=None):
        sentiments = sentiments or [0.9, 0.6, 0.2, -0.2, -0.8]
        return [
            stats(f"poi_{i}", f"Site {i}", count=10 - i, sentiment=s)
            for i, s in enumerate(sentiments)
        ]

    def photos(self, tmp_path, stats_list):
        paths = {}
        for s in stats_list:
            p = tmp_path / f"{s.poi_id}.png"
            Image.new("RGB", (16, 16)).save(p)
            paths[s.poi_id] = str(p)
        return paths

    def test_empty_store_creates_five(self, tmp_path):
        gallery = Gallery()
        sl = self.five_stats()
        delta = gallery.refresh("demo", sl, self.photos(tmp_path, sl))
        assert len(delta.created) == 5
        assert delta.retained == []

    def test_second_refresh_is_idempotent(self, tmp_path):
        gallery = Gallery()
        sl = self.five_stats()
        photos = self.photos(tmp_path, sl)
        gallery.refresh("demo", sl, photos)
        delta = gallery.refresh("demo", sl, photos)
        assert len(delta.created) == 0
        assert len(delta.retained) == 5

    def test_band_crossing_creates_exactly_one(self, tmp_path):
        gallery = Gallery()
        before = self.five_stats([0.9, 0.6, 0.2, -0.2, -0.8])
        photos = self.photos(tmp_path, before)
        gallery.refresh("demo", before, photos)
        # poi_2 drifts from calm (0.2) across the 0.5 boundary into bright
        after = self.five_stats([0.9, 0.6, 0.55, -0.2, -0.8])
        delta = gallery.refresh("demo", after, photos)
        assert len(delta.created) == 1
        assert delta.created[0].poi_id == "poi_2"
        assert len(delta.retained) == 4

    def test_small_drift_within_band_creates_nothing(self, tmp_path):
        gallery = Gallery()
        before = self.five_stats()
        photos = self.photos(tmp_path, before)
        gallery.refresh("demo", before, photos)
        after = self.five_stats([0.85, 0.55, 0.25, -0.25, -0.85])  # same bands
        delta = gallery.refresh("demo", after, photos)
        assert delta.created == []

    def test_stored_band_matches_descriptor_in_text(self, tmp_path):
        gallery = Gallery()
        sl = self.five_stats()
        delta = gallery.refresh("demo", sl, self.photos(tmp_path, sl))
        for artwork in delta.created:
            band = sentiment_band(artwork.prompt.sentiment)
            assert band.descriptor in artwork.prompt.prompt_text

    def test_current_view_capped_at_five(self, tmp_path):
        gallery = Gallery()
        sl = [stats(f"poi_{i}", f"Site {i}", count=i + 1, sentiment=0.3) for i in range(8)]
        photos = self.photos(tmp_path, sl)
        gallery.refresh("demo", sl, photos)
        assert len(gallery.current(sl)) == 5

    def test_persist_hook_called_per_created(self, tmp_path):
        seen = []
        gallery = Gallery(persist_hook=lambda uc, art: seen.append((uc, art.id)))
        sl = self.five_stats()
        delta = gallery.refresh("demo", sl, self.photos(tmp_path, sl))
        assert len(seen) == 5
        assert {uc for uc, _ in seen} == {"demo"}
        gallery.refresh("demo", sl, self.photos(tmp_path, sl))
        assert len(seen) == 5  # retained artworks are not re-persisted
