"""HTTP gateway for visitor devices and kiosks.

Request bodies and responses are JSON; errors come back as
``{code, message, session_id?}``.  Writes to one session are serialized
behind a per-session lock and persisted to the store before the response
is sent, so the event log is always at least as new as anything a client
has seen.
"""

from __future__ import annotations

import random
import threading
import time

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import affect, aggregate, errors, postcard, selection
from .catalog import Catalog
from .errors import AlreadyInterviewed, EmotrailError, UnknownSession, UnknownToken
from .selfreport import FREE_TEXT_MAX, AffectSliders
from .session import (
    Consent,
    EventKind,
    Phase,
    Session,
    apply_event,
    creation_event,
    make_event,
    new_visitor_token,
    replay,
    scores_to_payload,
)
from .store import ConsentDecision, SessionStore, record_for

_STATUS_BY_ERROR = {
    errors.UnknownSession: 404,
    errors.UnknownToken: 404,
    errors.UnknownEmotion: 404,
    errors.ParseError: 400,
    errors.ValidationError: 400,
    errors.RangeError: 400,
    errors.OutOfRange: 400,
    errors.SliderOutOfRange: 400,
    errors.TextTooLong: 400,
    errors.MappingMismatch: 400,
    errors.UnknownProfile: 400,
    errors.NonMonotoneTimestamp: 409,
    errors.InvalidTransition: 409,
    errors.EmotionReuse: 409,
    errors.NoReports: 409,
    errors.AlreadyInterviewed: 409,
    errors.AlreadyDecided: 409,
    errors.SequenceGap: 409,
    errors.SessionDeleted: 409,
    errors.EmptyReports: 409,
}

# wire codes mirror the error class names, except the session-lookup miss
_WIRE_CODE = {errors.UnknownSession: "NotFound"}


def _error_status(exc: EmotrailError) -> int:
    for cls in type(exc).__mro__:
        if cls in _STATUS_BY_ERROR:
            return _STATUS_BY_ERROR[cls]
    return 400


def _wire_code(exc: EmotrailError) -> str:
    return _WIRE_CODE.get(type(exc), type(exc).__name__)


def now_ms() -> int:
    return int(time.time() * 1000)


class Gateway:
    """In-memory session map over the persistent store, one writer per session."""

    def __init__(self, catalog: Catalog, store: SessionStore,
                 rng: random.Random | None = None,
                 scoring: affect.ScoringConfig = affect.DEFAULT_SCORING,
                 clock=now_ms):
        self.catalog = catalog
        self.store = store
        self.rng = rng or random.Random()
        self.scoring = scoring
        self.clock = clock
        self.sessions: dict[str, Session] = store.all_sessions()
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def _live_codes(self) -> set[str]:
        return {s.token.code for s in self.sessions.values()
                if s.state.phase < Phase.CONSENT_RESOLVED}

    def create_session(self) -> Session:
        with self._registry_lock:
            taken = {s.token.code for s in self.sessions.values()
                     if s.state.phase < Phase.CONSENT_RESOLVED}
            if len(taken) >= 1000:
                raise EmotrailError("no free visitor codes")
            while True:
                token = new_visitor_token(self.rng)
                if token.code not in taken:
                    break
            event = creation_event(token, self.clock())
            session = replay([event])
            self.store.append(record_for(session.session_id, event))
            self.sessions[session.session_id] = session
            return session

    def get(self, session_id: str) -> Session:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise UnknownSession(f"no session {session_id}") from None

    def submit(self, session_id: str, kind: EventKind, payload: dict) -> Session:
        """Apply and persist one event for a session, serialized per session."""
        with self._lock_for(session_id):
            session = self.get(session_id)
            event = make_event(session, kind, payload, self.clock())
            updated = apply_event(session, event)
            self.store.append(record_for(session_id, event))
            self.sessions[session_id] = updated
            return updated

    def resolve_token(self, token: str) -> Session:
        live = [s for s in self.sessions.values()
                if s.state.phase < Phase.CONSENT_RESOLVED]
        for s in live:
            if s.session_id == token:
                return s
        matches = [s for s in live if s.token.code == token]
        if not matches:
            raise UnknownToken(f"token {token!r} does not resolve to a live session")
        return matches[0]

    def scan_card(self, token: str) -> tuple[Session, selection.VideoChoice]:
        session = self.resolve_token(token)
        session_id = session.session_id
        with self._lock_for(session_id):
            session = self.get(session_id)
            if session.state.phase >= Phase.INTERVIEW_READY:
                raise AlreadyInterviewed(f"session {session_id} already had its interview")
            scan = make_event(session, EventKind.CARD_SCANNED, {}, self.clock())
            after_scan = apply_event(session, scan)  # NoReports surfaces here
            choice = selection.select_interview_video(after_scan.reports, self.catalog)
            start = make_event(after_scan, EventKind.INTERVIEW_STARTED, {
                "painting_id": choice.painting_id,
                "polarity": choice.polarity.value,
                "source_report_index": choice.source_report_index,
            }, self.clock())
            in_call = apply_event(after_scan, start)
            self.store.append(record_for(session_id, scan))
            self.store.append(record_for(session_id, start))
            self.sessions[session_id] = in_call
            return in_call, choice

    def render_postcard(self, session_id: str) -> bytes:
        with self._lock_for(session_id):
            session = self.get(session_id)
            scores = affect.score(
                affect.FauStream(frames=session.fau_frames, session_id=session_id),
                self.scoring,
            )
            payload = scores_to_payload(scores) if isinstance(scores, affect.AffectScores) else None
            event = make_event(session, EventKind.POSTCARD_RENDERED,
                               {"scores": payload}, self.clock())
            updated = apply_event(session, event)
            data = postcard.compose_postcard(updated, scores, self.catalog)
            svg = postcard.render_postcard_svg(data, self.catalog)
            self.store.append(record_for(session_id, event))
            postcard.write_postcard(data, self.catalog, self.store.postcards_dir, session_id)
            self.sessions[session_id] = updated
            return svg

    def record_consent(self, session_id: str, decision: Consent) -> dict:
        with self._lock_for(session_id):
            session = self.get(session_id)
            event = make_event(session, EventKind.CONSENT_RECORDED,
                               {"decision": decision.value}, self.clock())
            updated = apply_event(session, event)
            self.store.append(record_for(session_id, event))
            self.store.record_consent(ConsentDecision(
                session_id=session_id, decision=decision, ts=event.ts))
            if decision is Consent.WITHHELD:
                self.sessions.pop(session_id, None)
                return {"session_id": session_id, "phase": updated.state.phase.wire,
                        "decision": decision.value, "deleted": True}
            self.sessions[session_id] = updated
            return {"session_id": session_id, "phase": updated.state.phase.wire,
                    "decision": decision.value, "deleted": False}


def session_view(session: Session, catalog: Catalog) -> dict:
    video = None
    if session.chosen_video is not None:
        v = catalog.video_for(session.chosen_video.painting_id,
                              session.chosen_video.polarity)
        video = {
            "painting_id": v.painting_id,
            "polarity": v.polarity.value,
            "media_ref": v.media_ref,
            "transcript": v.transcript,
        }
    return {
        "session_id": session.session_id,
        "code": session.token.code,
        "phase": session.state.phase.wire,
        "touring_sub": session.state.touring_sub.value if session.state.touring_sub else None,
        "current_emotion": session.state.current_emotion,
        "emotions_used": sorted(session.emotions_used),
        "report_count": len(session.reports),
        "interview_ended": session.interview_ended,
        "consent": session.state.consent.value if session.state.consent else None,
        "video": video,
    }


def catalog_view(catalog: Catalog) -> dict:
    return {
        "emotions": [
            {
                "id": e.emotion.id,
                "display_name": e.emotion.display_name,
                "painting": {
                    "id": e.painting.id,
                    "title": e.painting.title,
                    "year": e.painting.year,
                    "image_ref": e.painting.image_ref,
                },
                "script": {
                    "story_text": e.script.story_text,
                    "fact_text": e.script.fact_text,
                    "question_text": e.script.question_text,
                    "durations": {
                        "story_s": e.script.story_duration_s,
                        "fact_s": e.script.fact_duration_s,
                        "question_s": e.script.question_duration_s,
                    },
                },
            }
            for e in catalog.entries
        ],
        "videos": [
            {"painting_id": v.painting_id, "polarity": v.polarity.value,
             "media_ref": v.media_ref, "transcript": v.transcript}
            for v in catalog.videos
        ],
    }


class ChoiceBody(BaseModel):
    emotion_id: str


class ReportBody(BaseModel):
    emotion_id: str
    valence: int
    arousal: int
    control: int
    free_text: str = ""


class ScanBody(BaseModel):
    token: str


class ConsentBody(BaseModel):
    decision: str


def create_app(catalog: Catalog, store: SessionStore,
               rng: random.Random | None = None,
               scoring: affect.ScoringConfig = affect.DEFAULT_SCORING,
               frontend_dir=None) -> FastAPI:
    app = FastAPI(title="emotrail gateway", docs_url=None, redoc_url=None)
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])
    gw = Gateway(catalog, store, rng=rng, scoring=scoring)
    app.state.gateway = gw

    @app.exception_handler(EmotrailError)
    async def _domain_error(request: Request, exc: EmotrailError):
        body = {"code": _wire_code(exc), "message": str(exc)}
        session_id = request.path_params.get("session_id")
        if session_id:
            body["session_id"] = session_id
        return JSONResponse(status_code=_error_status(exc), content=body)

    @app.get("/catalog")
    def get_catalog():
        return catalog_view(gw.catalog)

    @app.post("/sessions", status_code=201)
    def post_session():
        return session_view(gw.create_session(), gw.catalog)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return session_view(gw.get(session_id), gw.catalog)

    @app.post("/sessions/{session_id}/choice")
    def post_choice(session_id: str, body: ChoiceBody):
        entry = gw.catalog.entry_for_emotion(body.emotion_id)  # UnknownEmotion first
        session = gw.submit(session_id, EventKind.EMOTION_CHOSEN,
                            {"emotion_id": body.emotion_id})
        view = session_view(session, gw.catalog)
        view["painting"] = {
            "id": entry.painting.id,
            "title": entry.painting.title,
            "year": entry.painting.year,
            "image_ref": entry.painting.image_ref,
        }
        return view

    @app.post("/sessions/{session_id}/script-played")
    def post_script_played(session_id: str):
        return session_view(gw.submit(session_id, EventKind.SCRIPT_PLAYED, {}),
                            gw.catalog)

    @app.post("/sessions/{session_id}/report")
    def post_report(session_id: str, body: ReportBody):
        sliders = AffectSliders(body.valence, body.arousal, body.control)
        if len(body.free_text) > FREE_TEXT_MAX:
            raise errors.TextTooLong(
                f"free text is {len(body.free_text)} chars, cap {FREE_TEXT_MAX}")
        painting = gw.catalog.painting_for_emotion(body.emotion_id)
        session = gw.submit(session_id, EventKind.SELF_REPORT_SUBMITTED, {
            "emotion_id": body.emotion_id,
            "painting_id": painting.id,
            "valence": sliders.valence,
            "arousal": sliders.arousal,
            "control": sliders.control,
            "free_text": body.free_text,
        })
        view = session_view(session, gw.catalog)
        view["order_index"] = len(session.reports)
        return view

    @app.post("/kiosk/scan")
    def post_scan(body: ScanBody):
        session, choice = gw.scan_card(body.token)
        view = session_view(session, gw.catalog)
        view["video_choice"] = {"painting_id": choice.painting_id,
                                "polarity": choice.polarity.value,
                                "source_report_index": choice.source_report_index}
        return view

    @app.post("/sessions/{session_id}/fau")
    async def post_fau(session_id: str, request: Request):
        csv_text = (await request.body()).decode("utf-8")
        affect.parse_fau_csv(csv_text)  # reject malformed batches before logging
        session = gw.submit(session_id, EventKind.FAU_BATCH_INGESTED,
                            {"csv_text": csv_text})
        view = session_view(session, gw.catalog)
        view["total_frames"] = len(session.fau_frames)
        return view

    @app.post("/sessions/{session_id}/interview-ended")
    def post_interview_ended(session_id: str):
        return session_view(gw.submit(session_id, EventKind.INTERVIEW_ENDED, {}),
                            gw.catalog)

    @app.post("/sessions/{session_id}/postcard")
    def post_postcard(session_id: str):
        svg = gw.render_postcard(session_id)
        return Response(content=svg, media_type="image/svg+xml")

    @app.post("/sessions/{session_id}/consent")
    def post_consent(session_id: str, body: ConsentBody):
        try:
            decision = Consent(body.decision.strip().capitalize())
        except ValueError:
            raise errors.ValidationError(
                f"decision must be Donated or Withheld, got {body.decision!r}") from None
        return gw.record_consent(session_id, decision)

    @app.get("/aggregates/stats")
    def get_stats():
        dataset = aggregate.load_dataset(gw.store)
        return aggregate.summary_stats(dataset).to_dict()

    @app.get("/aggregates/emotion-map.svg")
    def get_emotion_map():
        dataset = aggregate.load_dataset(gw.store)
        svg = aggregate.render_emotion_map(dataset, gw.catalog)
        return Response(content=svg, media_type="image/svg+xml")

    if frontend_dir is not None:
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True),
                  name="frontend")

    return app
