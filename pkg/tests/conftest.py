import random

import pytest
import yaml

from emotrail.catalog import default_catalog, load_catalog
from emotrail.selfreport import AffectSliders, SelfReport


@pytest.fixture(scope="session")
def catalog():
    return default_catalog()


def make_catalog_config(pairs, durations=None):
    """Config dict for load_catalog from (emotion_id, painting_id, title) triples."""
    durations = durations or {"story_s": 60, "fact_s": 25, "question_s": 12}
    emotions = []
    videos = []
    for emotion_id, painting_id, title in pairs:
        emotions.append({
            "id": emotion_id,
            "display_name": emotion_id.replace("-", " ").title(),
            "painting": {
                "id": painting_id,
                "title": title,
                "year": None,
                "image_ref": f"assets/{painting_id}.jpg",
            },
            "script": {
                "story_text": f"A story for {title}.",
                "fact_text": f"A fact about {title}.",
                "question_text": f"A question about {title}.",
                "durations": dict(durations),
            },
        })
        for polarity in ("positive", "negative"):
            videos.append({
                "painting_id": painting_id,
                "polarity": polarity,
                "media_ref": f"assets/{painting_id}_{polarity}.mp4",
                "transcript": f"A {polarity} conversation about {title}.",
            })
    return {"emotions": emotions, "videos": videos}


def catalog_from_pairs(pairs):
    return load_catalog(yaml.safe_dump(make_catalog_config(pairs)))


# Titles as printed on the reference postcard; visit order matters.
FIG4_PAIRS = [
    ("self-confidence", "self-portrait", "Self Portrait with Brushes"),
    ("love", "vampire", "Vampire"),
    ("passion", "madonna", "Madonna"),
    ("fear", "scream", "Scream"),
    ("obsession", "christian-munch", "Christian Munch in the Armchair"),
    ("sadness", "sick-child", "Sick Child"),
]

FIG4_FREE_TEXTS = [
    "Hopeful, but not a life priority.",
    "Relieved, I now know how not to feel.",
    "I am easily annoyed, but I calm people around me.",
    "Social control, peer pressure, censorship.",
    "I feel proud of him",
    "Lego, upstairs, rain, save, imagination going wild",
]


@pytest.fixture(scope="session")
def fig4_catalog():
    return catalog_from_pairs(FIG4_PAIRS)


def make_report(emotion_id="love", painting_id="vampire", valence=50, arousal=50,
                control=50, free_text="", order_index=1, ts_ms=0):
    return SelfReport(
        emotion_id=emotion_id,
        painting_id=painting_id,
        sliders=AffectSliders(valence, arousal, control),
        free_text=free_text,
        order_index=order_index,
        ts_ms=ts_ms,
    )


@pytest.fixture
def rng():
    return random.Random(0xE307)
