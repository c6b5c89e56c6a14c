import io
import json

import pytest

from rhythmtutor.assessment import ErrorMatrix, aggregate
from rhythmtutor.complexity import adjusted_complexity
from rhythmtutor.core import parse_pattern
from rhythmtutor.errors import CourseComplete, DomainError, StaleAttemptError, UnknownLearnerError
from rhythmtutor.session import (
    DEFAULT_CYCLE_SEQUENCE,
    SHORT_COURSE_LIMITS,
    LearnerProfile,
    SessionState,
    SessionStore,
    advance_session,
    current_pattern,
    hash_password,
    progress_report,
    record_attempt,
    record_failed_attempt,
    short_course_state,
    verify_password,
)


def result(passed: bool):
    entry = 1.0 if passed else 50.0
    return aggregate(ErrorMatrix(((0.0, entry), (entry, entry))))


def passing():
    return result(True)


def failing():
    return result(False)


# --- profiles and passwords ---


def test_profile_validation():
    LearnerProfile("id1", "Ana", "beginner", True)
    with pytest.raises(DomainError):
        LearnerProfile("id1", "Ana", "expert", True)
    with pytest.raises(DomainError):
        LearnerProfile("id1", "Ana", "beginner", False)


def test_password_hash_round_trip():
    stored = hash_password("s3cret")
    assert stored["algo"] == "scrypt"
    assert verify_password("s3cret", stored)
    assert not verify_password("wrong", stored)
    assert hash_password("s3cret") != stored  # fresh salt each time


# --- session progression ---


def test_fresh_session_starts_at_cycle_4_rank_0():
    state = SessionState(learner_id="x")
    pattern, cfg = current_pattern(state)
    assert pattern.cycle_len == 4
    assert (cfg.ppm, cfg.fs, cfg.repeats) == (160.0, 44100, 4)


def test_assigned_complexity_non_decreasing_within_cycle():
    state = SessionState(learner_id="x")
    last = None
    for _ in range(15):  # full cycle-4 curriculum
        pattern, _ = current_pattern(state)
        value = adjusted_complexity(pattern).adjusted_value
        if last is not None:
            assert value >= last
        last = value
        state = record_attempt(state, passing(), timestamp=0.0)
    assert current_pattern(state)[0].cycle_len == 3


def test_cycle_order_4_3_5_7():
    assert DEFAULT_CYCLE_SEQUENCE == (4, 3, 5, 7)
    state = SessionState(learner_id="x")
    seen = []
    while not state.complete:
        pattern, _ = current_pattern(state)
        if not seen or seen[-1] != pattern.cycle_len:
            seen.append(pattern.cycle_len)
        state = record_attempt(state, passing(), timestamp=0.0)
    assert seen == [4, 3, 5, 7]
    assert len(state.history) == 15 + 7 + 31 + 127


def test_fail_keeps_pattern_and_counts():
    state = SessionState(learner_id="x")
    pattern, _ = current_pattern(state)
    state = record_attempt(state, failing(), timestamp=0.0)
    state = record_attempt(state, failing(), timestamp=1.0)
    assert state.attempts_on_current == 2
    assert current_pattern(state)[0] == pattern
    state = record_attempt(state, passing(), timestamp=2.0)
    assert state.attempts_on_current == 0
    assert current_pattern(state)[0] != pattern


def test_errored_attempt_counts():
    state = SessionState(learner_id="x")
    err = DomainError("silent recording")
    state = record_failed_attempt(state, err, timestamp=0.0)
    assert state.attempts_on_current == 1
    assert state.history[-1].failure_reason == "silent recording"
    assert not state.history[-1].passed


def test_stale_attempt_rejected():
    state = SessionState(learner_id="x")
    with pytest.raises(StaleAttemptError):
        record_attempt(state, passing(), expected_pattern="0101")


def test_course_complete_signals():
    state = SessionState(learner_id="x", cycle_sequence=(2,))
    for _ in range(3):
        state = record_attempt(state, passing(), timestamp=0.0)
    assert state.complete
    with pytest.raises(CourseComplete):
        current_pattern(state)
    with pytest.raises(CourseComplete):
        advance_session(state)


def test_short_course_is_23_patterns():
    assert sum(SHORT_COURSE_LIMITS) == 23
    state = short_course_state("x")
    count = 0
    while not state.complete:
        current_pattern(state)
        state = record_attempt(state, passing(), timestamp=0.0)
        count += 1
    assert count == 23


def test_deferred_advancement():
    state = SessionState(learner_id="x")
    before, _ = current_pattern(state)
    state = record_attempt(state, passing(), auto_advance=False, timestamp=0.0)
    assert current_pattern(state)[0] == before
    state = advance_session(state)
    assert current_pattern(state)[0] != before


# --- progress report ---


def test_progress_report_empty():
    report = progress_report(SessionState(learner_id="x"))
    assert report["total_attempts"] == 0
    assert [c["cycle_len"] for c in report["cycles"]] == [4, 3, 5, 7]
    assert all(c["patterns"] == [] for c in report["cycles"])


def test_progress_report_attempt_counts_and_errors():
    state = SessionState(learner_id="x")
    pattern = str(current_pattern(state)[0])
    state = record_attempt(state, failing(), timestamp=0.0)
    state = record_attempt(state, failing(), timestamp=1.0)
    state = record_attempt(state, passing(), timestamp=2.0)
    report = progress_report(state)
    row = report["cycles"][0]["patterns"][0]
    assert row["pattern"] == pattern
    assert row["attempts"] == 3
    assert row["passed"]
    # passing result above: per-onset (0.5, 1.0), per-cycle (0.5, 1.0)
    assert row["abs_avg_beat_error"] == pytest.approx(0.75)
    assert row["abs_avg_cycle_error"] == pytest.approx(0.75)


# --- store ---


def test_store_register_and_duplicate(tmp_path):
    store = SessionStore(str(tmp_path / "s.json"))
    profile = store.register("Ana", "pw", "professional", True)
    assert store.get_profile(profile.learner_id).display_name == "Ana"
    with pytest.raises(DomainError, match="already registered"):
        store.register("Ana", "other", "beginner", True)
    with pytest.raises(DomainError, match="consent"):
        store.register("Bea", "pw", "beginner", False)


def test_store_authentication(tmp_path):
    store = SessionStore(str(tmp_path / "s.json"))
    profile = store.register("Ana", "pw", "beginner", True)
    assert store.authenticate("Ana", "pw") == profile.learner_id
    assert store.authenticate("Ana", "nope") is None
    assert store.authenticate("Ghost", "pw") is None


def test_store_unknown_learner(tmp_path):
    store = SessionStore(str(tmp_path / "s.json"))
    with pytest.raises(UnknownLearnerError):
        store.get_state("nope")


def test_store_round_trip_across_restart(tmp_path):
    path = str(tmp_path / "s.json")
    store = SessionStore(path)
    profile = store.register("Ana", "pw", "beginner", True)
    state = store.get_state(profile.learner_id)
    state = record_attempt(state, failing(), timestamp=10.25)
    state = record_attempt(state, passing(), timestamp=11.5)
    store.save_state(state)

    reopened = SessionStore(path)
    assert reopened.get_state(profile.learner_id) == state


def test_store_rejects_unknown_schema(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"schema_version": 99, "learners": {}}))
    with pytest.raises(DomainError, match="schema"):
        SessionStore(str(path))


def test_export_history_jsonl(tmp_path):
    store = SessionStore(str(tmp_path / "s.json"))
    profile = store.register("Ana", "pw", "beginner", True)
    state = store.get_state(profile.learner_id)
    state = record_attempt(state, failing(), timestamp=0.0)
    state = record_attempt(state, passing(), timestamp=1.0)
    store.save_state(state)
    out = io.StringIO()
    assert store.export_history(out) == 2
    lines = [json.loads(l) for l in out.getvalue().splitlines()]
    assert all(l["learner_id"] == profile.learner_id for l in lines)
    assert [l["attempt_no"] for l in lines] == [1, 2]
