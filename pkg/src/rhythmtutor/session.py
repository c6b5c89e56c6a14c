"""Learner sessions: curriculum position, attempt history, persistence.

A session walks the complexity-ordered curriculum cycle by cycle
(default cycle lengths 4, 3, 5, 7). Every attempt is recorded; the
session advances only when an attempt passes the error bounds. State is
kept in an embedded JSON store that survives process restarts; writes
are atomic (write-then-rename) and serialized through a store lock.
"""

from __future__ import annotations

import hashlib
import json
import os
import secrets
import tempfile
import threading
import time
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import IO

from .assessment import AssessmentResult
from .complexity import enumerate_curriculum
from .core import RhythmPattern, TimingConfig, parse_pattern
from .errors import CourseComplete, DomainError, StaleAttemptError, UnknownLearnerError

SCHEMA_VERSION = 1

DEFAULT_CYCLE_SEQUENCE = (4, 3, 5, 7)

#: 23-pattern short course: the lowest-complexity patterns of each cycle,
#: 6 + 5 + 6 + 6 over cycles 4, 3, 5, 7.
SHORT_COURSE_LIMITS = (6, 5, 6, 6)

EXPERIENCE_TIERS = ("beginner", "amateur", "professional")

_SCRYPT = {"n": 2 ** 14, "r": 8, "p": 1}


@dataclass(frozen=True)
class LearnerProfile:
    learner_id: str
    display_name: str
    experience_tier: str
    consent_flag: bool

    def __post_init__(self):
        if self.experience_tier not in EXPERIENCE_TIERS:
            raise DomainError(
                f"experience_tier must be one of {EXPERIENCE_TIERS}, "
                f"got {self.experience_tier!r}"
            )
        if not self.consent_flag:
            raise DomainError("consent is required before any result is persisted")


@dataclass(frozen=True)
class AttemptRecord:
    """One attempt against one pattern.

    Attempts that error out before a matrix exists (silence, onset-count
    mismatch) still count: they carry a failure reason instead of a result.
    """

    pattern: str
    attempt_no: int
    result: AssessmentResult | None
    timestamp: float
    failure_reason: str | None = None
    failure_stage: str | None = None

    @property
    def passed(self) -> bool:
        return self.result is not None and self.result.passed

    def to_dict(self) -> dict:
        return {
            "pattern": self.pattern,
            "attempt_no": self.attempt_no,
            "result": self.result.to_dict() if self.result is not None else None,
            "timestamp": self.timestamp,
            "failure_reason": self.failure_reason,
            "failure_stage": self.failure_stage,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AttemptRecord":
        result = data.get("result")
        return cls(
            pattern=data["pattern"],
            attempt_no=data["attempt_no"],
            result=AssessmentResult.from_dict(result) if result is not None else None,
            timestamp=data["timestamp"],
            failure_reason=data.get("failure_reason"),
            failure_stage=data.get("failure_stage"),
        )


@dataclass(frozen=True)
class SessionState:
    learner_id: str
    cycle_sequence: tuple[int, ...] = DEFAULT_CYCLE_SEQUENCE
    pattern_limits: tuple[int, ...] | None = None
    cycle_index: int = 0
    pattern_rank: int = 0
    attempts_on_current: int = 0
    history: tuple[AttemptRecord, ...] = ()

    def __post_init__(self):
        if self.pattern_limits is not None and len(self.pattern_limits) != len(
            self.cycle_sequence
        ):
            raise DomainError("pattern_limits must match cycle_sequence length")
        if self.cycle_index < 0 or self.cycle_index > len(self.cycle_sequence):
            raise DomainError("cycle_index out of range")

    @property
    def complete(self) -> bool:
        return self.cycle_index >= len(self.cycle_sequence)

    def to_dict(self) -> dict:
        return {
            "learner_id": self.learner_id,
            "cycle_sequence": list(self.cycle_sequence),
            "pattern_limits": (
                list(self.pattern_limits) if self.pattern_limits is not None else None
            ),
            "cycle_index": self.cycle_index,
            "pattern_rank": self.pattern_rank,
            "attempts_on_current": self.attempts_on_current,
            "history": [rec.to_dict() for rec in self.history],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SessionState":
        limits = data.get("pattern_limits")
        return cls(
            learner_id=data["learner_id"],
            cycle_sequence=tuple(data["cycle_sequence"]),
            pattern_limits=tuple(limits) if limits is not None else None,
            cycle_index=data["cycle_index"],
            pattern_rank=data["pattern_rank"],
            attempts_on_current=data["attempts_on_current"],
            history=tuple(AttemptRecord.from_dict(r) for r in data["history"]),
        )


@lru_cache(maxsize=None)
def _curriculum_strings(cycle_len: int) -> tuple[str, ...]:
    return tuple(str(s.pattern) for s in enumerate_curriculum(cycle_len))


def _cycle_size(state: SessionState, cycle_index: int) -> int:
    full = len(_curriculum_strings(state.cycle_sequence[cycle_index]))
    if state.pattern_limits is None:
        return full
    return min(full, state.pattern_limits[cycle_index])


def short_course_state(learner_id: str) -> SessionState:
    """Fresh session over the 23-pattern short course."""
    return SessionState(learner_id=learner_id, pattern_limits=SHORT_COURSE_LIMITS)


def current_pattern(
    state: SessionState, config: TimingConfig | None = None
) -> tuple[RhythmPattern, TimingConfig]:
    """The pattern the learner should perform next, with its timing."""
    if state.complete:
        raise CourseComplete(f"learner {state.learner_id} finished the course")
    cycle_len = state.cycle_sequence[state.cycle_index]
    text = _curriculum_strings(cycle_len)[state.pattern_rank]
    return parse_pattern(text), config or TimingConfig()


def advance_session(state: SessionState) -> SessionState:
    """Move to the next pattern, or the next cycle, or completion."""
    if state.complete:
        raise CourseComplete(f"learner {state.learner_id} finished the course")
    rank = state.pattern_rank + 1
    if rank < _cycle_size(state, state.cycle_index):
        return replace(state, pattern_rank=rank, attempts_on_current=0)
    return replace(
        state, cycle_index=state.cycle_index + 1, pattern_rank=0, attempts_on_current=0
    )


def _append(
    state: SessionState, record: AttemptRecord, auto_advance: bool
) -> SessionState:
    state = replace(
        state,
        attempts_on_current=state.attempts_on_current + 1,
        history=state.history + (record,),
    )
    if auto_advance and record.passed:
        state = advance_session(state)
    return state


def _check_current(state: SessionState, expected_pattern: str | None) -> str:
    pattern, _ = current_pattern(state)
    text = str(pattern)
    if expected_pattern is not None and expected_pattern != text:
        raise StaleAttemptError(
            f"attempt targets {expected_pattern}, session is on {text}"
        )
    return text


def record_attempt(
    state: SessionState,
    result: AssessmentResult,
    auto_advance: bool = True,
    expected_pattern: str | None = None,
    timestamp: float | None = None,
) -> SessionState:
    """Append an assessed attempt; advance on pass (unless deferred)."""
    text = _check_current(state, expected_pattern)
    record = AttemptRecord(
        pattern=text,
        attempt_no=state.attempts_on_current + 1,
        result=result,
        timestamp=time.time() if timestamp is None else timestamp,
    )
    return _append(state, record, auto_advance)


def record_failed_attempt(
    state: SessionState,
    error: DomainError,
    expected_pattern: str | None = None,
    timestamp: float | None = None,
) -> SessionState:
    """Append an attempt that errored before assessment produced a matrix."""
    text = _check_current(state, expected_pattern)
    record = AttemptRecord(
        pattern=text,
        attempt_no=state.attempts_on_current + 1,
        result=None,
        timestamp=time.time() if timestamp is None else timestamp,
        failure_reason=str(error),
        failure_stage=error.stage,
    )
    return _append(state, record, auto_advance=False)


def progress_report(state: SessionState) -> dict:
    """Per-pattern attempt counts and error averages, grouped by cycle.

    Beat error is the mean of |per-onset averages| from the pattern's
    passing attempt; cycle error likewise over per-cycle averages.
    """
    per_pattern: dict[str, dict] = {}
    for rec in state.history:
        entry = per_pattern.setdefault(
            rec.pattern,
            {
                "pattern": rec.pattern,
                "cycle_len": len(rec.pattern),
                "attempts": 0,
                "passed": False,
                "abs_avg_beat_error": None,
                "abs_avg_cycle_error": None,
            },
        )
        entry["attempts"] += 1
        if rec.passed:
            entry["passed"] = True
            res = rec.result
            entry["abs_avg_beat_error"] = sum(
                abs(v) for v in res.per_onset_avg
            ) / len(res.per_onset_avg)
            entry["abs_avg_cycle_error"] = sum(
                abs(v) for v in res.per_cycle_avg
            ) / len(res.per_cycle_avg)
    cycles = []
    for cycle_len in state.cycle_sequence:
        rows = [e for e in per_pattern.values() if e["cycle_len"] == cycle_len]
        cycles.append({"cycle_len": cycle_len, "patterns": rows})
    return {
        "learner_id": state.learner_id,
        "complete": state.complete,
        "total_attempts": len(state.history),
        "cycles": cycles,
    }


# --- password hashing ---------------------------------------------------------

def hash_password(password: str) -> dict:
    salt = secrets.token_bytes(16)
    digest = hashlib.scrypt(password.encode(), salt=salt, **_SCRYPT)
    return {"algo": "scrypt", "salt": salt.hex(), "hash": digest.hex()}


def verify_password(password: str, stored: dict) -> bool:
    if stored.get("algo") != "scrypt":
        return False
    digest = hashlib.scrypt(
        password.encode(), salt=bytes.fromhex(stored["salt"]), **_SCRYPT
    )
    return secrets.compare_digest(digest.hex(), stored["hash"])


# --- persistence --------------------------------------------------------------

class SessionStore:
    """File-backed store of profiles, credentials, and session states.

    The whole store is one JSON document rewritten atomically on every
    mutation (learner counts here are tiny). Mutations hold the store
    lock, which enforces the single-writer-per-learner rule.
    """

    def __init__(self, path: str):
        self.path = path
        self._lock = threading.RLock()
        if os.path.exists(path):
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
            version = data.get("schema_version")
            if version != SCHEMA_VERSION:
                raise DomainError(f"unsupported store schema version {version!r}")
            self._data = data
        else:
            self._data = {"schema_version": SCHEMA_VERSION, "learners": {}}
            self._flush()

    def _flush(self) -> None:
        directory = os.path.dirname(os.path.abspath(self.path))
        fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(self._data, fh)
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, self.path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def register(
        self,
        display_name: str,
        password: str,
        experience_tier: str,
        consent: bool,
        short_course: bool = False,
    ) -> LearnerProfile:
        if not consent:
            raise DomainError("consent is required before any result is persisted")
        with self._lock:
            for rec in self._data["learners"].values():
                if rec["profile"]["display_name"] == display_name:
                    raise DomainError(f"name already registered: {display_name!r}")
            learner_id = secrets.token_hex(8)
            profile = LearnerProfile(
                learner_id=learner_id,
                display_name=display_name,
                experience_tier=experience_tier,
                consent_flag=True,
            )
            state = (
                short_course_state(learner_id)
                if short_course
                else SessionState(learner_id=learner_id)
            )
            self._data["learners"][learner_id] = {
                "profile": {
                    "learner_id": learner_id,
                    "display_name": display_name,
                    "experience_tier": experience_tier,
                    "consent_flag": True,
                },
                "password": hash_password(password),
                "session": state.to_dict(),
            }
            self._flush()
            return profile

    def authenticate(self, display_name: str, password: str) -> str | None:
        """learner_id on valid credentials, else None."""
        with self._lock:
            for learner_id, rec in self._data["learners"].items():
                if rec["profile"]["display_name"] == display_name:
                    if verify_password(password, rec["password"]):
                        return learner_id
                    return None
        return None

    def _record(self, learner_id: str) -> dict:
        rec = self._data["learners"].get(learner_id)
        if rec is None:
            raise UnknownLearnerError(f"unknown learner: {learner_id!r}")
        return rec

    def get_profile(self, learner_id: str) -> LearnerProfile:
        with self._lock:
            return LearnerProfile(**self._record(learner_id)["profile"])

    def get_state(self, learner_id: str) -> SessionState:
        with self._lock:
            return SessionState.from_dict(self._record(learner_id)["session"])

    def save_state(self, state: SessionState) -> None:
        with self._lock:
            self._record(state.learner_id)["session"] = state.to_dict()
            self._flush()

    def learner_ids(self) -> list[str]:
        with self._lock:
            return list(self._data["learners"])

    def export_history(self, out: IO[str]) -> int:
        """Write the full attempt history as JSON lines; returns line count."""
        with self._lock:
            count = 0
            for learner_id, rec in self._data["learners"].items():
                for attempt in rec["session"]["history"]:
                    line = {"learner_id": learner_id, **attempt}
                    out.write(json.dumps(line) + "\n")
                    count += 1
            return count
