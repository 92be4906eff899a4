"""Event-sourced per-visitor session state machine.

The canonical trajectory is onboarding -> gallery loop -> interview ->
postcard -> consent.  Sessions are immutable values folded from an
append-only event log; ``apply_event`` is pure, so replaying a log always
reproduces the live state.

Touring sub-states: ``Selected`` covers both "an emotion is chosen and
the script is pending" (current_emotion set) and "back at the grid after
a report" (current_emotion cleared).  ``Listening`` is the transient
playback state the server passes through when the script-played event
arrives; the stored state lands on ``Reporting``, which gates report
submission on completed playback.

Event payloads are self-contained (the resolved painting id rides in the
report event, the computed video choice in the interview event, computed
scores in the postcard event) so replay never needs a catalog or scoring
config.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from . import affect
from .affect import AffectScores, FauFrame
from .catalog import Polarity
from .errors import (
    EmotionReuse,
    InvalidTransition,
    NoReports,
    NonMonotoneTimestamp,
    SequenceGap,
)
from .selection import VideoChoice
from .selfreport import AffectSliders, SelfReport

MAX_EMOTIONS = 6


class Phase(enum.IntEnum):
    REGISTERED = 0
    TOURING = 1
    INTERVIEW_READY = 2
    IN_CALL = 3
    POSTCARD_ISSUED = 4
    CONSENT_RESOLVED = 5

    @property
    def wire(self) -> str:
        return _PHASE_WIRE[self]


_PHASE_WIRE = {
    Phase.REGISTERED: "Registered",
    Phase.TOURING: "Touring",
    Phase.INTERVIEW_READY: "InterviewReady",
    Phase.IN_CALL: "InCall",
    Phase.POSTCARD_ISSUED: "PostcardIssued",
    Phase.CONSENT_RESOLVED: "ConsentResolved",
}


class TouringSub(str, enum.Enum):
    SELECTED = "Selected"
    LISTENING = "Listening"
    REPORTING = "Reporting"


class Consent(str, enum.Enum):
    DONATED = "Donated"
    WITHHELD = "Withheld"


class EventKind(str, enum.Enum):
    SESSION_CREATED = "SessionCreated"
    EMOTION_CHOSEN = "EmotionChosen"
    SCRIPT_PLAYED = "ScriptPlayed"
    SELF_REPORT_SUBMITTED = "SelfReportSubmitted"
    CARD_SCANNED = "CardScanned"
    INTERVIEW_STARTED = "InterviewStarted"
    FAU_BATCH_INGESTED = "FauBatchIngested"
    INTERVIEW_ENDED = "InterviewEnded"
    POSTCARD_RENDERED = "PostcardRendered"
    CONSENT_RECORDED = "ConsentRecorded"


@dataclass(frozen=True)
class Event:
    kind: EventKind
    payload: dict
    ts: int
    seq: int


@dataclass(frozen=True)
class VisitorToken:
    code: str       # 3-digit decimal string, zero-padded
    token_id: str   # 128-bit opaque id, hex


@dataclass(frozen=True)
class SessionState:
    phase: Phase
    touring_sub: TouringSub | None = None
    current_emotion: str | None = None
    consent: Consent | None = None


@dataclass(frozen=True)
class Session:
    token: VisitorToken
    state: SessionState
    reports: tuple[SelfReport, ...] = ()
    emotions_used: frozenset = frozenset()
    scores: AffectScores | None = None
    chosen_video: VideoChoice | None = None
    # ingest buffer for FAU batches, accumulated during the call
    fau_frames: tuple[FauFrame, ...] = ()
    interview_ended: bool = False
    last_seq: int = 0

    @property
    def session_id(self) -> str:
        return self.token.token_id


def new_visitor_token(rng) -> VisitorToken:
    """Fresh token: random zero-padded 3-digit code plus 128-bit id."""
    code = f"{rng.randrange(1000):03d}"
    token_id = f"{rng.getrandbits(128):032x}"
    return VisitorToken(code=code, token_id=token_id)


def creation_event(token: VisitorToken, now_ms: int) -> Event:
    return Event(
        kind=EventKind.SESSION_CREATED,
        payload={"code": token.code, "token_id": token.token_id},
        ts=now_ms,
        seq=1,
    )


def create_session(now_ms: int, rng) -> Session:
    """Start a session: phase Registered, fresh token, creation event applied."""
    return replay([creation_event(new_visitor_token(rng), now_ms)])


def make_event(session: Session, kind: EventKind, payload: dict, ts: int) -> Event:
    """Next event for a live session, with the contiguous sequence number."""
    return Event(kind=kind, payload=dict(payload), ts=ts, seq=session.last_seq + 1)


def scores_to_payload(scores: AffectScores | None) -> dict | None:
    if scores is None:
        return None
    return {
        "enjoyment": scores.enjoyment,
        "engagement": scores.engagement,
        "frustration": scores.frustration,
        "valid_frame_count": scores.valid_frame_count,
        "coverage": scores.coverage,
    }


def scores_from_payload(raw: dict | None) -> AffectScores | None:
    if raw is None:
        return None
    return AffectScores(
        enjoyment=float(raw["enjoyment"]),
        engagement=float(raw["engagement"]),
        frustration=float(raw["frustration"]),
        valid_frame_count=int(raw["valid_frame_count"]),
        coverage=float(raw["coverage"]),
    )


def _bad(event: Event, state: SessionState) -> InvalidTransition:
    where = state.phase.wire
    if state.touring_sub is not None:
        where += f"({state.touring_sub.value})"
    return InvalidTransition(f"{event.kind.value} not legal in {where}")


def apply_event(session: Session, event: Event) -> Session:
    """Fold one event into the session, enforcing the transition table."""
    if event.seq != session.last_seq + 1:
        raise SequenceGap(
            f"event seq {event.seq} after {session.last_seq}; expected {session.last_seq + 1}"
        )
    state = session.state
    kind = event.kind

    if kind is EventKind.SESSION_CREATED:
        # only ever legal as the first event, which replay() handles
        raise _bad(event, state)

    if kind is EventKind.EMOTION_CHOSEN:
        if state.phase not in (Phase.REGISTERED, Phase.TOURING):
            raise _bad(event, state)
        emotion = event.payload["emotion_id"]
        if emotion in session.emotions_used:
            raise EmotionReuse(f"emotion {emotion!r} already used this session")
        if len(session.emotions_used) >= MAX_EMOTIONS:
            raise InvalidTransition("all six emotions already used")
        return replace(
            session,
            state=SessionState(Phase.TOURING, TouringSub.SELECTED, emotion),
            emotions_used=session.emotions_used | {emotion},
            last_seq=event.seq,
        )

    if kind is EventKind.SCRIPT_PLAYED:
        if (state.phase is not Phase.TOURING
                or state.touring_sub is not TouringSub.SELECTED
                or state.current_emotion is None):
            raise _bad(event, state)
        # playback (Listening) is transient; completion lands on Reporting
        return replace(
            session,
            state=SessionState(Phase.TOURING, TouringSub.REPORTING, state.current_emotion),
            last_seq=event.seq,
        )

    if kind is EventKind.SELF_REPORT_SUBMITTED:
        if state.phase is not Phase.TOURING or state.touring_sub is not TouringSub.REPORTING:
            raise _bad(event, state)
        p = event.payload
        if p["emotion_id"] != state.current_emotion:
            raise InvalidTransition(
                f"report for {p['emotion_id']!r} while {state.current_emotion!r} is active"
            )
        report = SelfReport(
            emotion_id=p["emotion_id"],
            painting_id=p["painting_id"],
            sliders=AffectSliders(int(p["valence"]), int(p["arousal"]), int(p["control"])),
            free_text=p.get("free_text", ""),
            order_index=len(session.reports) + 1,
            ts_ms=event.ts,
        )
        return replace(
            session,
            state=SessionState(Phase.TOURING, TouringSub.SELECTED, None),
            reports=session.reports + (report,),
            last_seq=event.seq,
        )

    if kind is EventKind.CARD_SCANNED:
        if state.phase not in (Phase.REGISTERED, Phase.TOURING):
            raise _bad(event, state)
        if not session.reports:
            raise NoReports("card scanned before any self-report")
        return replace(
            session,
            state=SessionState(Phase.INTERVIEW_READY),
            last_seq=event.seq,
        )

    if kind is EventKind.INTERVIEW_STARTED:
        if state.phase is not Phase.INTERVIEW_READY:
            raise _bad(event, state)
        p = event.payload
        choice = VideoChoice(
            painting_id=p["painting_id"],
            polarity=Polarity(p["polarity"]),
            source_report_index=int(p["source_report_index"]),
        )
        return replace(
            session,
            state=SessionState(Phase.IN_CALL),
            chosen_video=choice,
            last_seq=event.seq,
        )

    if kind is EventKind.FAU_BATCH_INGESTED:
        if state.phase is not Phase.IN_CALL or session.interview_ended:
            raise _bad(event, state)
        batch = affect.parse_fau_csv(event.payload["csv_text"])
        if batch.frames and session.fau_frames:
            if batch.frames[0].ts_ms <= session.fau_frames[-1].ts_ms:
                raise NonMonotoneTimestamp(2, "batch overlaps the previous batch")
        return replace(
            session,
            fau_frames=session.fau_frames + batch.frames,
            last_seq=event.seq,
        )

    if kind is EventKind.INTERVIEW_ENDED:
        if state.phase is not Phase.IN_CALL or session.interview_ended:
            raise _bad(event, state)
        return replace(session, interview_ended=True, last_seq=event.seq)

    if kind is EventKind.POSTCARD_RENDERED:
        if state.phase is not Phase.IN_CALL or not session.interview_ended:
            raise _bad(event, state)
        return replace(
            session,
            state=SessionState(Phase.POSTCARD_ISSUED),
            scores=scores_from_payload(event.payload.get("scores")),
            last_seq=event.seq,
        )

    if kind is EventKind.CONSENT_RECORDED:
        if state.phase is not Phase.POSTCARD_ISSUED:
            raise _bad(event, state)
        decision = Consent(event.payload["decision"])
        return replace(
            session,
            state=SessionState(Phase.CONSENT_RESOLVED, consent=decision),
            last_seq=event.seq,
        )

    raise _bad(event, state)


def replay(events: Sequence[Event] | Iterable[Event]) -> Session:
    """Fold an event log into a session.

    The log must begin with SessionCreated at seq 1 and be contiguous;
    the first offending event's error propagates.
    """
    events = list(events)
    if not events:
        raise InvalidTransition("empty log: no SessionCreated event")
    first = events[0]
    if first.kind is not EventKind.SESSION_CREATED:
        raise InvalidTransition(f"log starts with {first.kind.value}, not SessionCreated")
    if first.seq != 1:
        raise SequenceGap(f"SessionCreated has seq {first.seq}, expected 1")
    token = VisitorToken(code=first.payload["code"], token_id=first.payload["token_id"])
    session = Session(token=token, state=SessionState(Phase.REGISTERED), last_seq=1)
    for event in events[1:]:
        session = apply_event(session, event)
    return session
