"""Seeded synthetic visitor traffic for stores.

Two profiles:

* ``uniform``: n independent visitors, most completing the experience,
  with uniformly random emotion subsets and slider values.
* ``paper-2019``: a fixed deployment-shaped fixture: 132 completed
  sessions (131 donated, 1 withheld and therefore deleted on consent)
  plus 65 partial sessions, constructed so the aggregate first-choice,
  strongest-response, and engagement tallies come out to exact target
  counts keyed by emotion.  Free parameters the targets do not pin down
  (slider noise, visit order beyond the first painting, phrase choice)
  are drawn from the seeded generator.

Everything is deterministic in (seed, profile, n): identical runs
produce byte-identical stores.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import affect, selection
from .catalog import Catalog
from .errors import UnknownProfile
from .session import (
    Consent,
    EventKind,
    Session,
    apply_event,
    creation_event,
    make_event,
    new_visitor_token,
    replay,
    scores_to_payload,
)
from .store import ConsentDecision, SessionStore, record_for

PROFILE_UNIFORM = "uniform"
PROFILE_PAPER_2019 = "paper-2019"

# Synthetic deployment morning, fixed so runs are reproducible.
DEFAULT_BASE_TS = 1_567_000_000_000

# paper-2019 per-emotion targets over the 131 donated sessions.  First
# choice and strongest each sum to 131; engagements sum to 655, which
# fixes the mean paintings per visitor at exactly 5.0.
_FIRST_QUOTA = {"love": 105, "self-confidence": 15, "passion": 6,
                "fear": 2, "sadness": 2, "obsession": 1}
_STRONGEST_QUOTA = {"sadness": 37, "fear": 28, "self-confidence": 23,
                    "love": 18, "obsession": 17, "passion": 8}
_ENGAGEMENT_QUOTA = {"love": 119, "fear": 112, "sadness": 110,
                     "self-confidence": 109, "passion": 107, "obsession": 98}
_DONATED = 131
_PARTIAL = 65

_PHRASES = (
    "",
    "hard to put into words",
    "a knot in my chest",
    "calmer than I expected",
    "it pulled me right in",
    "like an old memory surfacing",
    "restless, wanted to move",
    "warm and a bit sad",
    "I kept thinking about home",
    "unsettled but curious",
)


@dataclass(frozen=True)
class SimReport:
    complete: int
    partial: int
    donated: int
    withheld: int


class SessionWriter:
    """Drives one session through the state machine and the store."""

    def __init__(self, store: SessionStore, catalog: Catalog, rng: random.Random,
                 start_ts: int, step_ms: int = 15_000):
        self.store = store
        self.catalog = catalog
        self.rng = rng
        self.ts = start_ts
        self.step_ms = step_ms
        token = new_visitor_token(rng)
        event = creation_event(token, self._tick())
        self.session: Session = replay([event])
        store.append(record_for(self.session.session_id, event))

    def _tick(self) -> int:
        ts = self.ts
        self.ts += self.step_ms
        return ts

    def _emit(self, kind: EventKind, payload: dict) -> None:
        event = make_event(self.session, kind, payload, self._tick())
        self.session = apply_event(self.session, event)
        self.store.append(record_for(self.session.session_id, event))

    def choose(self, emotion_id: str) -> None:
        self._emit(EventKind.EMOTION_CHOSEN, {"emotion_id": emotion_id})

    def script_played(self) -> None:
        self._emit(EventKind.SCRIPT_PLAYED, {})

    def report(self, emotion_id: str, valence: int, arousal: int, control: int,
               free_text: str) -> None:
        painting = self.catalog.painting_for_emotion(emotion_id)
        self._emit(EventKind.SELF_REPORT_SUBMITTED, {
            "emotion_id": emotion_id,
            "painting_id": painting.id,
            "valence": valence,
            "arousal": arousal,
            "control": control,
            "free_text": free_text,
        })

    def visit(self, emotion_id: str, valence: int, arousal: int, control: int,
              free_text: str) -> None:
        self.choose(emotion_id)
        self.script_played()
        self.report(emotion_id, valence, arousal, control, free_text)

    def interview(self, frames: int = 45) -> None:
        choice = selection.select_interview_video(self.session.reports, self.catalog)
        self._emit(EventKind.CARD_SCANNED, {})
        self._emit(EventKind.INTERVIEW_STARTED, {
            "painting_id": choice.painting_id,
            "polarity": choice.polarity.value,
            "source_report_index": choice.source_report_index,
        })
        self._emit(EventKind.FAU_BATCH_INGESTED, {"csv_text": self._fau_csv(frames)})
        self._emit(EventKind.INTERVIEW_ENDED, {})

    def postcard(self) -> None:
        scores = affect.score(affect.FauStream(frames=self.session.fau_frames,
                                               session_id=self.session.session_id))
        payload = scores_to_payload(scores) if isinstance(scores, affect.AffectScores) else None
        self._emit(EventKind.POSTCARD_RENDERED, {"scores": payload})

    def consent(self, decision: Consent) -> None:
        self._emit(EventKind.CONSENT_RECORDED, {"decision": decision.value})
        self.store.record_consent(ConsentDecision(
            session_id=self.session.session_id, decision=decision, ts=self.ts))

    def _fau_csv(self, frames: int) -> str:
        rng = self.rng
        lines = [affect.FAU_CSV_HEADER]
        pitch, yaw, roll = 0.0, 0.0, 0.0
        base = (rng.uniform(0.0, 2.0), rng.uniform(0.0, 1.5), rng.uniform(0.0, 2.5),
                rng.uniform(0.0, 1.5), rng.uniform(0.0, 1.5))
        for i in range(frames):
            ts = i * 66
            valid = 1 if rng.random() > 0.05 else 0
            conf = round(rng.uniform(0.7, 0.99), 3)
            aus = [min(5.0, max(0.0, b + rng.uniform(-0.4, 0.4))) for b in base]
            pitch += rng.uniform(-0.02, 0.02)
            yaw += rng.uniform(-0.03, 0.03)
            roll += rng.uniform(-0.01, 0.01)
            lines.append(
                f"{ts},{valid},{conf:.3f},"
                + ",".join(f"{a:.3f}" for a in aus)
                + f",{pitch:.4f},{yaw:.4f},{roll:.4f}"
            )
        return "\n".join(lines) + "\n"


def _paper_assignment(rng: random.Random):
    """Per-session (first, strongest, engaged-set) labels hitting the quotas."""
    first: list[str] = []
    for emotion, quota in _FIRST_QUOTA.items():
        first.extend([emotion] * quota)
    assert len(first) == _DONATED

    strongest: list[str | None] = [None] * _DONATED
    # all strongest=love sessions sit inside the first=love block, which
    # keeps enough love-free sessions available for engagement removal
    love_first = [i for i, e in enumerate(first) if e == "love"]
    for i in love_first[:_STRONGEST_QUOTA["love"]]:
        strongest[i] = "love"
    rest = []
    for emotion, quota in _STRONGEST_QUOTA.items():
        if emotion != "love":
            rest.extend([emotion] * quota)
    rng.shuffle(rest)
    it = iter(rest)
    for i in range(_DONATED):
        if strongest[i] is None:
            strongest[i] = next(it)

    engaged = [set(_FIRST_QUOTA) for _ in range(_DONATED)]
    removals = [0] * _DONATED
    # tightest emotion first (love has only 26 eligible sessions)
    for emotion in sorted(_ENGAGEMENT_QUOTA, key=lambda e: _ENGAGEMENT_QUOTA[e], reverse=True):
        need = _DONATED - _ENGAGEMENT_QUOTA[emotion]
        candidates = [i for i in range(_DONATED)
                      if first[i] != emotion and strongest[i] != emotion
                      and emotion in engaged[i]]
        candidates.sort(key=lambda i: (removals[i], i))
        if len(candidates) < need:
            raise AssertionError(f"infeasible removal for {emotion}")
        for i in candidates[:need]:
            engaged[i].discard(emotion)
            removals[i] += 1
    return first, strongest, engaged


def _slider_profile(rng: random.Random, emotion: str) -> tuple[int, int]:
    """(valence, control) flavored per emotion; arousal is set by the caller."""
    ranges = {
        "love": (20, 90),
        "self-confidence": (55, 96),
        "passion": (40, 91),
        "fear": (5, 45),
        "sadness": (5, 45),
        "obsession": (20, 80),
    }
    lo, hi = ranges.get(emotion, (10, 90))
    return rng.randrange(lo, hi), rng.randrange(20, 81)


def _run_complete(writer: SessionWriter, order: list[str], strongest: str,
                  rng: random.Random, decision: Consent) -> None:
    for emotion in order:
        valence, control = _slider_profile(rng, emotion)
        arousal = 95 if emotion == strongest else rng.randrange(10, 86)
        writer.visit(emotion, valence, arousal, control, rng.choice(_PHRASES))
    writer.interview()
    writer.postcard()
    writer.consent(decision)


def _simulate_paper(store: SessionStore, catalog: Catalog, seed: int,
                    base_ts: int) -> SimReport:
    for emotion in _FIRST_QUOTA:
        catalog.painting_for_emotion(emotion)  # profile requires these six
    rng = random.Random(seed)
    first, strongest, engaged = _paper_assignment(rng)

    slot = 0
    for i in range(_DONATED):
        writer = SessionWriter(store, catalog, rng, base_ts + slot * 600_000)
        slot += 1
        others = sorted(engaged[i] - {first[i]})
        rng.shuffle(others)
        _run_complete(writer, [first[i]] + others, strongest[i], rng, Consent.DONATED)

    # the one completed visitor who withheld; deleted by record_consent
    writer = SessionWriter(store, catalog, rng, base_ts + slot * 600_000)
    slot += 1
    order = sorted(_FIRST_QUOTA)
    rng.shuffle(order)
    _run_complete(writer, order, order[0], rng, Consent.WITHHELD)

    emotions = sorted(_FIRST_QUOTA)
    for i in range(_PARTIAL):
        writer = SessionWriter(store, catalog, rng, base_ts + slot * 600_000)
        slot += 1
        depth = i % 5
        if depth == 0:
            continue  # registered, never chose
        chosen = rng.sample(emotions, k=min(1 + i % 3, 6))
        if depth == 1:
            writer.choose(chosen[0])
            continue
        if depth == 2:
            writer.choose(chosen[0])
            writer.script_played()
            continue
        for emotion in chosen:
            valence, control = _slider_profile(rng, emotion)
            writer.visit(emotion, valence, rng.randrange(10, 96), control,
                         rng.choice(_PHRASES))
        if depth == 4:
            writer.interview()  # answered the call but walked away
    return SimReport(complete=_DONATED + 1, partial=_PARTIAL,
                     donated=_DONATED, withheld=1)


def _simulate_uniform(store: SessionStore, catalog: Catalog, n_sessions: int,
                      seed: int, base_ts: int) -> SimReport:
    rng = random.Random(seed)
    emotions = [e.id for e in catalog.emotions()]
    complete = partial = withheld = 0
    for i in range(n_sessions):
        writer = SessionWriter(store, catalog, rng, base_ts + i * 600_000)
        count = rng.randrange(1, len(emotions) + 1)
        order = rng.sample(emotions, k=count)
        finishes = rng.random() < 0.8
        if not finishes:
            partial += 1
            for emotion in order[: max(1, count // 2)]:
                valence, control = _slider_profile(rng, emotion)
                writer.visit(emotion, valence, rng.randrange(0, 101), control,
                             rng.choice(_PHRASES))
            continue
        strongest = rng.choice(order)
        decision = Consent.DONATED if rng.random() < 0.95 else Consent.WITHHELD
        _run_complete(writer, order, strongest, rng, decision)
        complete += 1
        if decision is Consent.WITHHELD:
            withheld += 1
    return SimReport(complete=complete, partial=partial,
                     donated=complete - withheld, withheld=withheld)


def simulate(store: SessionStore, catalog: Catalog, n_sessions: int = 10,
             seed: int = 0, profile: str = PROFILE_UNIFORM,
             base_ts: int = DEFAULT_BASE_TS) -> SimReport:
    """Populate a store with synthetic sessions; deterministic in the seed."""
    if profile == PROFILE_PAPER_2019:
        return _simulate_paper(store, catalog, seed, base_ts)
    if profile == PROFILE_UNIFORM:
        return _simulate_uniform(store, catalog, n_sessions, seed, base_ts)
    raise UnknownProfile(f"no simulation profile {profile!r}")
