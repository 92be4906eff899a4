import pytest
import yaml

from emotrail.catalog import default_catalog, default_catalog_bytes, load_catalog
from emotrail.errors import ParseError, UnknownEmotion, ValidationError

from conftest import FIG4_PAIRS, make_catalog_config


def test_default_catalog_shape(catalog):
    assert len(catalog.entries) == 6
    assert len(catalog.videos) == 12


def test_attested_mappings(catalog):
    assert catalog.painting_for_emotion("love").title == "Vampire"
    assert catalog.painting_for_emotion("obsession").title == "Christian Munch on the Couch"


def test_unknown_emotion(catalog):
    with pytest.raises(UnknownEmotion):
        catalog.painting_for_emotion("joy")


def test_load_is_deterministic():
    raw = default_catalog_bytes()
    assert load_catalog(raw) == load_catalog(raw)


def test_emotion_painting_bijection(catalog):
    paintings = [catalog.painting_for_emotion(e.id).id for e in catalog.emotions()]
    assert len(paintings) == 6
    assert len(set(paintings)) == 6


def test_video_referential_integrity(catalog):
    painting_ids = {e.painting.id for e in catalog.entries}
    for video in catalog.videos:
        assert video.painting_id in painting_ids


def test_both_polarities_per_painting(catalog):
    for entry in catalog.entries:
        for polarity in ("positive", "negative"):
            video = catalog.video_for(entry.painting.id, polarity)
            assert video.painting_id == entry.painting.id


def test_five_entries_rejected():
    config = make_catalog_config(FIG4_PAIRS)
    config["emotions"] = config["emotions"][:5]
    with pytest.raises(ValidationError, match="entry count"):
        load_catalog(yaml.safe_dump(config))


def test_missing_polarity_rejected():
    config = make_catalog_config(FIG4_PAIRS)
    config["videos"] = [v for v in config["videos"]
                        if not (v["painting_id"] == "vampire" and v["polarity"] == "negative")]
    with pytest.raises(ValidationError, match="missing polarity"):
        load_catalog(yaml.safe_dump(config))


def test_duplicate_emotion_rejected():
    config = make_catalog_config(FIG4_PAIRS)
    config["emotions"][1]["id"] = config["emotions"][0]["id"]
    with pytest.raises(ValidationError, match="duplicate emotion"):
        load_catalog(yaml.safe_dump(config))


def test_duplicate_painting_breaks_bijection():
    config = make_catalog_config(FIG4_PAIRS)
    config["emotions"][1]["painting"]["id"] = config["emotions"][0]["painting"]["id"]
    with pytest.raises(ValidationError, match="bijection"):
        load_catalog(yaml.safe_dump(config))


def test_empty_script_segment_rejected():
    config = make_catalog_config(FIG4_PAIRS)
    config["emotions"][0]["script"]["fact_text"] = "  "
    with pytest.raises(ValidationError, match="fact_text"):
        load_catalog(yaml.safe_dump(config))


def test_nonpositive_duration_rejected():
    config = make_catalog_config(FIG4_PAIRS)
    config["emotions"][0]["script"]["durations"]["story_s"] = 0
    with pytest.raises(ValidationError, match="positive"):
        load_catalog(yaml.safe_dump(config))


def test_malformed_document_is_parse_error():
    with pytest.raises(ParseError):
        load_catalog(b"emotions: [unclosed")
    with pytest.raises(ParseError):
        load_catalog(b"- just\n- a\n- list\n")


def test_unknown_video_painting_rejected():
    config = make_catalog_config(FIG4_PAIRS)
    config["videos"][0]["painting_id"] = "nonexistent"
    with pytest.raises(ValidationError, match="nonexistent"):
        load_catalog(yaml.safe_dump(config))


def test_title_alias_preserved():
    catalog = default_catalog()
    painting = catalog.painting_for_emotion("obsession")
    assert painting.title_alias == "Christian Munch in the Armchair"
