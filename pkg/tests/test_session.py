import random

import pytest

from emotrail.errors import (
    EmotionReuse,
    EmotrailError,
    InvalidTransition,
    NoReports,
    SequenceGap,
)
from emotrail.session import (
    Consent,
    Event,
    EventKind,
    Phase,
    TouringSub,
    apply_event,
    create_session,
    make_event,
    replay,
)

import oracles


class FixedRng:
    """Deterministic stand-in for random.Random."""

    def __init__(self, code_value=7, bits_value=0xABCDEF):
        self.code_value = code_value
        self.bits_value = bits_value

    def randrange(self, n):
        return self.code_value % n

    def getrandbits(self, n):
        return self.bits_value


def test_create_initial_state():
    session = create_session(1000, random.Random(1))
    assert session.state.phase is Phase.REGISTERED
    assert session.reports == ()
    assert session.emotions_used == frozenset()
    assert session.last_seq == 1


def test_create_distinct_token_ids():
    rng = random.Random(2)
    a = create_session(0, rng)
    b = create_session(0, rng)
    assert a.token.token_id != b.token.token_id


def test_code_zero_padded():
    session = create_session(0, FixedRng(code_value=7))
    assert session.token.code == "007"


def test_first_transition():
    session = create_session(0, random.Random(3))
    event = make_event(session, EventKind.EMOTION_CHOSEN, {"emotion_id": "love"}, 10)
    after = apply_event(session, event)
    assert after.state.phase is Phase.TOURING
    assert after.state.touring_sub is TouringSub.SELECTED
    assert after.state.current_emotion == "love"
    assert after.emotions_used == frozenset({"love"})


def test_emotion_reuse_rejected():
    session = create_session(0, random.Random(4))
    session = apply_event(session, make_event(session, EventKind.EMOTION_CHOSEN,
                                              {"emotion_id": "love"}, 10))
    with pytest.raises(EmotionReuse):
        apply_event(session, make_event(session, EventKind.EMOTION_CHOSEN,
                                        {"emotion_id": "love"}, 20))


def test_scan_without_reports():
    session = create_session(0, random.Random(5))
    with pytest.raises(NoReports):
        apply_event(session, make_event(session, EventKind.CARD_SCANNED, {}, 10))


def test_sequence_gap_rejected():
    session = create_session(0, random.Random(6))
    event = Event(kind=EventKind.EMOTION_CHOSEN, payload={"emotion_id": "love"},
                  ts=10, seq=5)
    with pytest.raises(SequenceGap):
        apply_event(session, event)


def test_eleven_event_happy_path():
    events = oracles.build_events("in_call")
    # extend with a second FAU batch, the wrap-up, and consent: 11 events total
    tail = [
        (EventKind.FAU_BATCH_INGESTED, dict(oracles._FAU[1])),
        (EventKind.FAU_BATCH_INGESTED,
         {"csv_text": oracles._FAU[1]["csv_text"].replace("\n0,", "\n50,")}),
        (EventKind.INTERVIEW_ENDED, {}),
        (EventKind.POSTCARD_RENDERED, {"scores": None}),
        (EventKind.CONSENT_RECORDED, {"decision": "Donated"}),
    ]
    seq = events[-1].seq
    for kind, payload in tail:
        seq += 1
        events.append(Event(kind=kind, payload=payload, ts=seq * 1000, seq=seq))
    assert len(events) == 11
    session = replay(events)
    assert session.state.phase is Phase.CONSENT_RESOLVED
    assert session.state.consent is Consent.DONATED
    assert len(session.fau_frames) == 2


def test_replay_empty_log():
    with pytest.raises(InvalidTransition):
        replay([])


def test_replay_requires_creation_first():
    event = Event(kind=EventKind.EMOTION_CHOSEN, payload={"emotion_id": "love"},
                  ts=0, seq=1)
    with pytest.raises(InvalidTransition):
        replay([event])


def test_second_scan_after_interview_is_invalid():
    events = oracles.build_events("postcard_issued")
    session = replay(events)
    with pytest.raises(InvalidTransition):
        apply_event(session, make_event(session, EventKind.CARD_SCANNED, {}, 10**6))


def test_choosing_new_emotion_skips_report():
    events = oracles.build_events("touring_reporting_no_reports")
    session = replay(events)
    after = apply_event(session, make_event(session, EventKind.EMOTION_CHOSEN,
                                            {"emotion_id": "fear"}, 10**6))
    assert after.state.current_emotion == "fear"
    assert after.reports == ()  # only submitted reports count


def test_transition_table_exhaustive():
    """Every (abstract state, event kind) pair behaves per the oracle table."""
    for state_name in oracles.STATE_BUILDERS:
        base = replay(oracles.build_events(state_name))
        for kind in oracles.ALL_KINDS:
            expected = oracles.expected_outcome(state_name, kind)
            probe = make_event(base, EventKind(kind),
                               oracles.probe_payload(state_name, kind), 10**7)
            if expected == "ok":
                after = apply_event(base, probe)
                assert after.state.phase >= base.state.phase, (state_name, kind)
            else:
                with pytest.raises(EmotrailError) as exc:
                    apply_event(base, probe)
                assert type(exc.value).__name__ == expected, (state_name, kind)


def test_replay_equals_incremental():
    rng = random.Random(99)
    for _ in range(100):
        events = oracles.random_legal_sequence(rng)
        incremental = replay(events[:1])
        for event in events[1:]:
            incremental = apply_event(incremental, event)
        assert replay(events) == incremental


def test_phase_monotone_and_emotion_budget():
    rng = random.Random(123)
    for _ in range(100):
        events = oracles.random_legal_sequence(rng)
        session = replay(events[:1])
        prev_phase = session.state.phase
        chosen = 0
        for event in events[1:]:
            session = apply_event(session, event)
            assert session.state.phase >= prev_phase
            prev_phase = session.state.phase
            if event.kind is EventKind.EMOTION_CHOSEN:
                chosen += 1
        assert len(session.emotions_used) == chosen
        assert len(session.emotions_used) <= 6


def test_touring_sub_present_iff_touring():
    rng = random.Random(321)
    for _ in range(50):
        events = oracles.random_legal_sequence(rng)
        session = replay(events[:1])
        for event in events[1:]:
            session = apply_event(session, event)
            in_touring = session.state.phase is Phase.TOURING
            assert (session.state.touring_sub is not None) == in_touring
        has_consent = session.state.phase is Phase.CONSENT_RESOLVED
        assert (session.state.consent is not None) == has_consent
