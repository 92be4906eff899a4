"""The emotion/painting/script/interview-video configuration.

A catalog binds exactly six emotions one-to-one to six paintings, each
with a three-part audio script, plus one positive and one negative
interview video per painting (twelve in all).  Catalogs are immutable
after load; changing one means reloading.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from .errors import ParseError, UnknownEmotion, ValidationError

EMOTION_COUNT = 6
TOKEN_RE = re.compile(r"^[a-z][a-z0-9-]*$")


class Polarity(str, enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


@dataclass(frozen=True)
class Emotion:
    id: str
    display_name: str


@dataclass(frozen=True)
class Painting:
    id: str
    title: str
    year: int | None
    image_ref: str
    title_alias: str | None = None


@dataclass(frozen=True)
class Script:
    """Text stand-in for the three-part audio recording.

    Durations are pacing hints for the player, not enforced server-side.
    """

    story_text: str
    fact_text: str
    question_text: str
    story_duration_s: float
    fact_duration_s: float
    question_duration_s: float


@dataclass(frozen=True)
class InterviewVideo:
    painting_id: str
    polarity: Polarity
    media_ref: str
    transcript: str


@dataclass(frozen=True)
class CatalogEntry:
    emotion: Emotion
    painting: Painting
    script: Script


@dataclass(frozen=True)
class Catalog:
    entries: tuple[CatalogEntry, ...]
    videos: tuple[InterviewVideo, ...]
    _by_emotion: dict = field(repr=False, compare=False, default_factory=dict)
    _by_painting: dict = field(repr=False, compare=False, default_factory=dict)
    _videos_by_key: dict = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        self._by_emotion.update({e.emotion.id: e for e in self.entries})
        self._by_painting.update({e.painting.id: e for e in self.entries})
        self._videos_by_key.update({(v.painting_id, v.polarity): v for v in self.videos})

    def emotions(self) -> list[Emotion]:
        return [e.emotion for e in self.entries]

    def entry_for_emotion(self, emotion_id: str) -> CatalogEntry:
        try:
            return self._by_emotion[emotion_id]
        except KeyError:
            raise UnknownEmotion(f"no emotion {emotion_id!r} in catalog") from None

    def painting_for_emotion(self, emotion_id: str) -> Painting:
        return self.entry_for_emotion(emotion_id).painting

    def script_for_emotion(self, emotion_id: str) -> Script:
        return self.entry_for_emotion(emotion_id).script

    def painting(self, painting_id: str) -> Painting:
        try:
            return self._by_painting[painting_id].painting
        except KeyError:
            raise ValidationError(f"no painting {painting_id!r} in catalog") from None

    def video_for(self, painting_id: str, polarity: Polarity) -> InterviewVideo:
        try:
            return self._videos_by_key[(painting_id, Polarity(polarity))]
        except KeyError:
            raise ValidationError(
                f"no {Polarity(polarity).value} video for painting {painting_id!r}"
            ) from None


def painting_for_emotion(catalog: Catalog, emotion_id: str) -> Painting:
    return catalog.painting_for_emotion(emotion_id)


def _require(mapping, key, where, kind=None):
    if not isinstance(mapping, dict) or key not in mapping:
        raise ValidationError(f"{where}: missing key {key!r}")
    value = mapping[key]
    if kind is not None and not isinstance(value, kind):
        raise ValidationError(f"{where}: key {key!r} has wrong type {type(value).__name__}")
    return value


def _parse_script(raw, where) -> Script:
    texts = {}
    for key in ("story_text", "fact_text", "question_text"):
        text = _require(raw, key, where, str)
        if not text.strip():
            raise ValidationError(f"{where}: {key} is empty")
        texts[key] = text
    durations = _require(raw, "durations", where, dict)
    secs = {}
    for key in ("story_s", "fact_s", "question_s"):
        v = _require(durations, key, f"{where}.durations")
        if not isinstance(v, (int, float)) or isinstance(v, bool) or v <= 0:
            raise ValidationError(f"{where}.durations: {key} must be a positive number")
        secs[key] = float(v)
    return Script(
        story_text=texts["story_text"],
        fact_text=texts["fact_text"],
        question_text=texts["question_text"],
        story_duration_s=secs["story_s"],
        fact_duration_s=secs["fact_s"],
        question_duration_s=secs["question_s"],
    )


def load_catalog(config_bytes: bytes | str) -> Catalog:
    """Parse and validate a catalog config document.

    Raises ParseError for malformed documents and ValidationError naming
    the violated invariant.
    """
    if isinstance(config_bytes, bytes):
        try:
            text = config_bytes.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"config is not valid UTF-8: {exc}") from exc
    else:
        text = config_bytes
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParseError(f"config does not parse: {exc}") from exc
    if not isinstance(raw, dict):
        raise ParseError("config root must be a mapping")

    raw_emotions = _require(raw, "emotions", "config", list)
    if len(raw_emotions) != EMOTION_COUNT:
        raise ValidationError(
            f"entry count: expected {EMOTION_COUNT} emotions, got {len(raw_emotions)}"
        )

    entries = []
    seen_emotions: set[str] = set()
    seen_paintings: set[str] = set()
    for i, raw_entry in enumerate(raw_emotions):
        where = f"emotions[{i}]"
        eid = _require(raw_entry, "id", where, str)
        if not TOKEN_RE.match(eid):
            raise ValidationError(f"{where}: id {eid!r} is not a lowercase token")
        if eid in seen_emotions:
            raise ValidationError(f"duplicate emotion id {eid!r}")
        seen_emotions.add(eid)
        display = _require(raw_entry, "display_name", where, str)

        raw_painting = _require(raw_entry, "painting", where, dict)
        pid = _require(raw_painting, "id", f"{where}.painting", str)
        if not TOKEN_RE.match(pid):
            raise ValidationError(f"{where}.painting: id {pid!r} is not a lowercase token")
        if pid in seen_paintings:
            raise ValidationError(f"duplicate painting id {pid!r} breaks the emotion-painting bijection")
        seen_paintings.add(pid)
        title = _require(raw_painting, "title", f"{where}.painting", str)
        if not title.strip():
            raise ValidationError(f"{where}.painting: title is empty")
        year = raw_painting.get("year")
        if year is not None and (not isinstance(year, int) or isinstance(year, bool)):
            raise ValidationError(f"{where}.painting: year must be an integer")
        image_ref = _require(raw_painting, "image_ref", f"{where}.painting", str)
        alias = raw_painting.get("title_alias")
        if alias is not None and not isinstance(alias, str):
            raise ValidationError(f"{where}.painting: title_alias must be a string")

        script = _parse_script(_require(raw_entry, "script", where, dict), f"{where}.script")
        entries.append(
            CatalogEntry(
                emotion=Emotion(id=eid, display_name=display),
                painting=Painting(id=pid, title=title, year=year, image_ref=image_ref,
                                  title_alias=alias),
                script=script,
            )
        )

    raw_videos = _require(raw, "videos", "config", list)
    videos = []
    seen_keys: set[tuple[str, Polarity]] = set()
    for i, raw_video in enumerate(raw_videos):
        where = f"videos[{i}]"
        pid = _require(raw_video, "painting_id", where, str)
        if pid not in seen_paintings:
            raise ValidationError(f"{where}: painting_id {pid!r} not in emotions[]")
        raw_pol = _require(raw_video, "polarity", where, str)
        try:
            pol = Polarity(raw_pol)
        except ValueError:
            raise ValidationError(f"{where}: missing polarity or bad value {raw_pol!r}") from None
        key = (pid, pol)
        if key in seen_keys:
            raise ValidationError(f"{where}: duplicate video for ({pid}, {pol.value})")
        seen_keys.add(key)
        media_ref = _require(raw_video, "media_ref", where, str)
        transcript = _require(raw_video, "transcript", where, str)
        videos.append(InterviewVideo(painting_id=pid, polarity=pol,
                                     media_ref=media_ref, transcript=transcript))

    for pid in seen_paintings:
        for pol in Polarity:
            if (pid, pol) not in seen_keys:
                raise ValidationError(f"missing polarity: painting {pid!r} has no {pol.value} video")
    if len(videos) != 2 * EMOTION_COUNT:
        raise ValidationError(f"video count: expected {2 * EMOTION_COUNT}, got {len(videos)}")

    return Catalog(entries=tuple(entries), videos=tuple(videos))


def load_catalog_file(path: str | Path) -> Catalog:
    return load_catalog(Path(path).read_bytes())


def default_catalog_bytes() -> bytes:
    return resources.files("emotrail").joinpath("data/default_catalog.yaml").read_bytes()


def default_catalog() -> Catalog:
    """The bundled six-emotion catalog."""
    return load_catalog(default_catalog_bytes())
