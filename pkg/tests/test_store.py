import io
import json
import random
from pathlib import Path

import pytest

from emotrail.errors import AlreadyDecided, SequenceGap, SessionDeleted, UnknownSession
from emotrail.session import Consent, Phase
from emotrail.simulate import SessionWriter
from emotrail.store import ConsentDecision, EventRecord, SessionStore


def rec(session_id, seq, ts=0, kind="SessionCreated", payload=None):
    if payload is None:
        payload = {"code": "001", "token_id": session_id}
    return EventRecord(session_id=session_id, seq=seq, ts=ts, kind=kind,
                       payload=payload)


def scan_tree_for(root: Path, needle: str) -> bool:
    needle_bytes = needle.encode()
    for path in root.rglob("*"):
        if path.is_file() and needle_bytes in path.read_bytes():
            return True
    return False


def write_session(store, catalog, reports=2, decision=None, start_ts=10_000, rng=None):
    """Full FSM-valid session; returns its id."""
    rng = rng or random.Random(start_ts)
    writer = SessionWriter(store, catalog, rng, start_ts)
    emotions = [e.id for e in catalog.emotions()][:reports]
    for emotion in emotions:
        writer.visit(emotion, rng.randrange(101), rng.randrange(101),
                     rng.randrange(101), "fine")
    if decision is not None:
        writer.interview()
        writer.postcard()
        writer.consent(decision)
    return writer.session.session_id


class TestAppend:
    def test_first_append(self, tmp_path):
        store = SessionStore(tmp_path)
        store.append(rec("aaa", 1))
        assert store.exists("aaa")

    def test_sequence_gap(self, tmp_path):
        store = SessionStore(tmp_path)
        store.append(rec("aaa", 1))
        with pytest.raises(SequenceGap):
            store.append(rec("aaa", 3, kind="EmotionChosen", payload={}))

    def test_first_append_must_be_seq_one(self, tmp_path):
        store = SessionStore(tmp_path)
        with pytest.raises(SequenceGap):
            store.append(rec("aaa", 2))

    def test_append_after_delete(self, tmp_path, catalog):
        store = SessionStore(tmp_path)
        sid = write_session(store, catalog, decision=Consent.WITHHELD)
        with pytest.raises(SessionDeleted):
            store.append(rec(sid, 99, kind="EmotionChosen", payload={}))

    def test_survives_reopen(self, tmp_path):
        store = SessionStore(tmp_path)
        store.append(rec("aaa", 1, ts=5))
        store.append(rec("aaa", 2, ts=6, kind="EmotionChosen",
                         payload={"emotion_id": "love"}))
        reopened = SessionStore(tmp_path)
        events = reopened.events("aaa")
        assert [e.seq for e in events] == [1, 2]

    def test_torn_final_line_ignored(self, tmp_path):
        store = SessionStore(tmp_path)
        store.append(rec("aaa", 1, ts=5))
        log = tmp_path / "sessions" / "aaa.log"
        with log.open("a") as f:
            f.write('{"session_id": "aaa", "seq": 2, "ts": 6, "kind": "Emo')
        reopened = SessionStore(tmp_path)
        assert [e.seq for e in reopened.events("aaa")] == [1]


class TestConsent:
    def test_donated_retained(self, tmp_path, catalog):
        store = SessionStore(tmp_path)
        sid = write_session(store, catalog, decision=Consent.DONATED)
        session = store.load_session(sid)
        assert session.state.phase is Phase.CONSENT_RESOLVED
        assert sid in store.donated_ids()

    def test_withheld_deletes_everything(self, tmp_path, catalog):
        store = SessionStore(tmp_path)
        keep = write_session(store, catalog, decision=Consent.DONATED, start_ts=1000)
        gone = write_session(store, catalog, decision=Consent.WITHHELD, start_ts=2000)
        # postcard files for the withheld session are wiped too
        assert not store.exists(gone)
        with pytest.raises(UnknownSession):
            store.load_session(gone)
        assert not scan_tree_for(tmp_path, gone)
        assert scan_tree_for(tmp_path, keep)
        export = list(store.export_donated())
        assert [r["session_id"] for r in export] == [keep]

    def test_unknown_session(self, tmp_path):
        store = SessionStore(tmp_path)
        with pytest.raises(UnknownSession):
            store.record_consent(ConsentDecision("zzz", Consent.DONATED, 0))

    def test_second_decision_rejected(self, tmp_path, catalog):
        store = SessionStore(tmp_path)
        sid = write_session(store, catalog, decision=Consent.DONATED)
        with pytest.raises(AlreadyDecided):
            store.record_consent(ConsentDecision(sid, Consent.WITHHELD, 0))

    def test_withheld_counter(self, tmp_path, catalog):
        store = SessionStore(tmp_path)
        write_session(store, catalog, decision=Consent.WITHHELD)
        assert store.withheld_completed_count == 1
        reopened = SessionStore(tmp_path)
        assert reopened.withheld_completed_count == 1


class TestPurge:
    def test_empty_store(self, tmp_path):
        store = SessionStore(tmp_path)
        assert store.purge_incomplete(cutoff_ts=10**15) == 0

    def test_deployment_end_purge(self, tmp_path):
        # 132 decided sessions and 65 stale incomplete ones
        store = SessionStore(tmp_path)
        for i in range(132):
            sid = f"done{i:03d}"
            store.append(rec(sid, 1, ts=1000 + i))
            store.append(EventRecord(sid, 2, 2000 + i, "ConsentRecorded",
                                     {"decision": "Donated"}))
            store.record_consent(ConsentDecision(sid, Consent.DONATED, 2000 + i))
        for i in range(65):
            store.append(rec(f"part{i:03d}", 1, ts=3000 + i))
        deleted = store.purge_incomplete(cutoff_ts=10**9)
        assert deleted == 65
        assert len(store.donated_ids()) == 132
        assert store.partial_count() == 0
        for i in range(65):
            assert not scan_tree_for(tmp_path, f"part{i:03d}")

    def test_cutoff_respected(self, tmp_path):
        store = SessionStore(tmp_path)
        store.append(rec("old", 1, ts=100))
        store.append(rec("new", 1, ts=9000))
        assert store.purge_incomplete(cutoff_ts=5000) == 1
        assert store.exists("new")
        assert not store.exists("old")


class TestExport:
    def test_empty(self, tmp_path):
        store = SessionStore(tmp_path)
        assert list(store.export_donated()) == []

    def test_report_payloads_roundtrip(self, tmp_path, catalog):
        store = SessionStore(tmp_path)
        sid = write_session(store, catalog, reports=5, decision=Consent.DONATED)
        records = list(store.export_donated())
        assert len(records) == 1
        record = records[0]
        assert record["session_id"] == sid
        assert len(record["reports"]) == 5
        assert record["video_choice"] is not None
        assert record["consent"] == "Donated"
        orders = [r["order_index"] for r in record["reports"]]
        assert orders == [1, 2, 3, 4, 5]

    def test_jsonl_stream(self, tmp_path, catalog):
        store = SessionStore(tmp_path)
        write_session(store, catalog, decision=Consent.DONATED, start_ts=1)
        write_session(store, catalog, decision=Consent.DONATED, start_ts=2)
        buf = io.StringIO()
        assert store.export_donated_jsonl(buf) == 2
        lines = buf.getvalue().strip().splitlines()
        assert len(lines) == 2
        for line in lines:
            json.loads(line)

    def test_withheld_absent_from_export_bytes(self, tmp_path, catalog):
        store = SessionStore(tmp_path)
        write_session(store, catalog, decision=Consent.DONATED, start_ts=1)
        gone = write_session(store, catalog, decision=Consent.WITHHELD, start_ts=2)
        buf = io.StringIO()
        store.export_donated_jsonl(buf)
        assert gone not in buf.getvalue()
