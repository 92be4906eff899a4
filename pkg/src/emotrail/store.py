"""Append-only, consent-gated event persistence.

Layout under the store root:

    sessions/<session_id>.log   one JSON record per line, append-only
    postcards/postcard_<id>.*   rendered souvenirs (wiped with the session)
    index.json                  cache of per-session status, rebuilt on open
    counters.json               anonymous tallies (withheld/purged counts)

Hard deletion (withheld consent, or purge of stale incomplete sessions)
removes the log, the postcard files, and the index entry before the call
returns, leaving no trace of the session id anywhere under the root.
Deletion tombstones are held in memory only: persisting them would itself
retain the deleted id.  The counters file keeps plain counts with no
session linkage, so deployment-level statistics (for example how many
completed visitors withheld) survive the deletion.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from .affect import AffectScores, quantize_levels
from .errors import AlreadyDecided, SequenceGap, SessionDeleted, UnknownSession
from .session import Consent, Event, EventKind, Session, replay


@dataclass(frozen=True)
class EventRecord:
    session_id: str
    seq: int
    ts: int
    kind: str
    payload: dict


@dataclass(frozen=True)
class ConsentDecision:
    session_id: str
    decision: Consent
    ts: int


@dataclass
class _IndexEntry:
    seq: int
    last_ts: int
    consent: Consent | None = None


def record_for(session_id: str, event: Event) -> EventRecord:
    return EventRecord(session_id=session_id, seq=event.seq, ts=event.ts,
                       kind=event.kind.value, payload=event.payload)


def _fsync_dir(path: Path) -> None:
    fd = os.open(path, os.O_RDONLY)
    try:
        os.fsync(fd)
    finally:
        os.close(fd)


class SessionStore:
    """Filesystem-backed event store with consent-gated retention."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.sessions_dir = self.root / "sessions"
        self.postcards_dir = self.root / "postcards"
        self.sessions_dir.mkdir(parents=True, exist_ok=True)
        self.postcards_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()
        self._index: dict[str, _IndexEntry] = {}
        self._deleted: set[str] = set()
        self._counters = {"withheld_completed": 0, "purged_incomplete": 0}
        self._load()

    # -- loading ------------------------------------------------------------

    def _load(self) -> None:
        counters_path = self.root / "counters.json"
        if counters_path.exists():
            self._counters.update(json.loads(counters_path.read_text()))
        for log_path in sorted(self.sessions_dir.glob("*.log")):
            session_id = log_path.stem
            entry = None
            for rec in self._read_records(log_path):
                if entry is None:
                    entry = _IndexEntry(seq=rec.seq, last_ts=rec.ts)
                else:
                    entry.seq = rec.seq
                    entry.last_ts = rec.ts
                if rec.kind == EventKind.CONSENT_RECORDED.value:
                    entry.consent = Consent(rec.payload["decision"])
            if entry is not None:
                self._index[session_id] = entry
        self._persist_index()

    @staticmethod
    def _read_records(log_path: Path) -> Iterator[EventRecord]:
        # A torn final line (crash mid-append) is ignored: the write was
        # never acknowledged.
        with log_path.open("r", encoding="utf-8") as f:
            for line in f:
                if not line.endswith("\n"):
                    break
                try:
                    raw = json.loads(line)
                except json.JSONDecodeError:
                    break
                yield EventRecord(
                    session_id=raw["session_id"], seq=raw["seq"], ts=raw["ts"],
                    kind=raw["kind"], payload=raw["payload"],
                )

    # -- persistence helpers -------------------------------------------------

    def _persist_index(self) -> None:
        snapshot = {
            sid: {"seq": e.seq, "last_ts": e.last_ts,
                  "consent": e.consent.value if e.consent else None}
            for sid, e in sorted(self._index.items())
        }
        self._write_atomic(self.root / "index.json", json.dumps(snapshot, indent=2) + "\n")

    def _persist_counters(self) -> None:
        self._write_atomic(self.root / "counters.json",
                           json.dumps(self._counters, indent=2) + "\n")

    def _write_atomic(self, path: Path, text: str) -> None:
        tmp = path.with_suffix(path.suffix + ".tmp")
        with tmp.open("w", encoding="utf-8") as f:
            f.write(text)
            f.flush()
            os.fsync(f.fileno())
        tmp.replace(path)
        _fsync_dir(path.parent)

    def _log_path(self, session_id: str) -> Path:
        return self.sessions_dir / f"{session_id}.log"

    # -- writes ---------------------------------------------------------------

    def append(self, rec: EventRecord) -> None:
        """Durably append one event record; acknowledged means fsynced."""
        with self._lock:
            if rec.session_id in self._deleted:
                raise SessionDeleted(f"session {rec.session_id} was hard-deleted")
            entry = self._index.get(rec.session_id)
            expected = 1 if entry is None else entry.seq + 1
            if rec.seq != expected:
                raise SequenceGap(f"seq {rec.seq} for {rec.session_id}; expected {expected}")
            line = json.dumps(
                {"session_id": rec.session_id, "seq": rec.seq, "ts": rec.ts,
                 "kind": rec.kind, "payload": rec.payload},
            )
            path = self._log_path(rec.session_id)
            is_new = entry is None
            with path.open("a", encoding="utf-8") as f:
                f.write(line + "\n")
                f.flush()
                os.fsync(f.fileno())
            if is_new:
                _fsync_dir(self.sessions_dir)
                self._index[rec.session_id] = _IndexEntry(seq=rec.seq, last_ts=rec.ts)
            else:
                entry.seq = rec.seq
                entry.last_ts = rec.ts

    def record_consent(self, decision: ConsentDecision) -> None:
        """Apply retention: donated sessions persist, withheld ones vanish."""
        with self._lock:
            entry = self._index.get(decision.session_id)
            if entry is None:
                raise UnknownSession(f"no session {decision.session_id} in store")
            if entry.consent is not None:
                raise AlreadyDecided(f"session {decision.session_id} already decided")
            if decision.decision is Consent.DONATED:
                entry.consent = Consent.DONATED
                self._persist_index()
            else:
                self._counters["withheld_completed"] += 1
                self._hard_delete(decision.session_id)
                self._persist_counters()

    def _hard_delete(self, session_id: str) -> None:
        self._log_path(session_id).unlink(missing_ok=True)
        for suffix in (".svg", ".meta"):
            (self.postcards_dir / f"postcard_{session_id}{suffix}").unlink(missing_ok=True)
        self._index.pop(session_id, None)
        self._deleted.add(session_id)
        _fsync_dir(self.sessions_dir)
        _fsync_dir(self.postcards_dir)
        self._persist_index()

    def purge_incomplete(self, cutoff_ts: int) -> int:
        """Hard-delete consentless sessions whose last event precedes cutoff."""
        with self._lock:
            stale = [sid for sid, e in self._index.items()
                     if e.consent is None and e.last_ts < cutoff_ts]
            for sid in stale:
                self._hard_delete(sid)
            if stale:
                self._counters["purged_incomplete"] += len(stale)
                self._persist_counters()
            return len(stale)

    # -- reads ----------------------------------------------------------------

    def exists(self, session_id: str) -> bool:
        with self._lock:
            return session_id in self._index

    def events(self, session_id: str) -> list[Event]:
        with self._lock:
            if session_id not in self._index:
                raise UnknownSession(f"no session {session_id} in store")
            path = self._log_path(session_id)
        return [Event(kind=EventKind(r.kind), payload=r.payload, ts=r.ts, seq=r.seq)
                for r in self._read_records(path)]

    def load_session(self, session_id: str) -> Session:
        return replay(self.events(session_id))

    def session_ids(self) -> list[str]:
        with self._lock:
            return sorted(self._index)

    def all_sessions(self) -> dict[str, Session]:
        return {sid: self.load_session(sid) for sid in self.session_ids()}

    def donated_ids(self) -> list[str]:
        with self._lock:
            return sorted(sid for sid, e in self._index.items()
                          if e.consent is Consent.DONATED)

    def partial_count(self) -> int:
        """Sessions present without a consent decision."""
        with self._lock:
            return sum(1 for e in self._index.values() if e.consent is None)

    @property
    def withheld_completed_count(self) -> int:
        with self._lock:
            return self._counters["withheld_completed"]

    # -- export ----------------------------------------------------------------

    def export_donated(self) -> Iterator[dict]:
        """One record per donated-and-complete session, in stable id order."""
        for sid in self.donated_ids():
            session = self.load_session(sid)
            yield export_record(sid, session)

    def export_donated_jsonl(self, fp) -> int:
        count = 0
        for record in self.export_donated():
            fp.write(json.dumps(record) + "\n")
            count += 1
        return count


def export_record(session_id: str, session: Session) -> dict:
    scores = session.scores
    levels = quantize_levels(scores) if isinstance(scores, AffectScores) else None
    return {
        "session_id": session_id,
        "code": session.token.code,
        "consent": session.state.consent.value if session.state.consent else None,
        "reports": [
            {
                "emotion_id": r.emotion_id,
                "painting_id": r.painting_id,
                "valence": r.sliders.valence,
                "arousal": r.sliders.arousal,
                "control": r.sliders.control,
                "free_text": r.free_text,
                "order_index": r.order_index,
                "ts_ms": r.ts_ms,
            }
            for r in session.reports
        ],
        "scores": None if scores is None else {
            "enjoyment": scores.enjoyment,
            "engagement": scores.engagement,
            "frustration": scores.frustration,
            "valid_frame_count": scores.valid_frame_count,
            "coverage": scores.coverage,
        },
        "levels": None if levels is None else {
            "enjoyment": levels.enjoyment_level,
            "engagement": levels.engagement_level,
            "frustration": levels.frustration_level,
        },
        "video_choice": None if session.chosen_video is None else {
            "painting_id": session.chosen_video.painting_id,
            "polarity": session.chosen_video.polarity.value,
            "source_report_index": session.chosen_video.source_report_index,
        },
    }
