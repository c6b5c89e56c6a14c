"""HTTP facade over the teacher loop.

All endpoints live under ``/api/v1`` and speak JSON, except the rendered
pattern audio (WAV) and the attempt upload (raw WAV body). Auth is a
bearer token from /login, held in memory with a TTL; profiles, sessions
and attempt history live in the file-backed session store and are
persisted before any 2xx response is sent.

A passing attempt does not move the session by itself: /pattern stays
byte-identical until the client calls /advance, which is where
advancement is applied. This keeps /pattern idempotent while the learner
reviews their result.
"""

from __future__ import annotations

import secrets
import threading
import time
from typing import Optional

from fastapi import Depends, FastAPI, Header, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .assessment import assess
from .core import TimingConfig
from .errors import CourseComplete, DomainError, UnknownLearnerError, WavFormatError
from .session import (
    EXPERIENCE_TIERS,
    SessionStore,
    advance_session,
    current_pattern,
    progress_report,
    record_attempt,
    record_failed_attempt,
)
from .synthesis import render
from .wav_io import read_wav_bytes, wav_bytes

API_PREFIX = "/api/v1"
MAX_UPLOAD_BYTES = 32 * 1024 * 1024
DEFAULT_TOKEN_TTL = 24 * 3600.0


class _TokenTable:
    def __init__(self, ttl: float):
        self.ttl = ttl
        self._tokens: dict[str, tuple[str, float]] = {}
        self._lock = threading.Lock()

    def issue(self, learner_id: str) -> tuple[str, float]:
        token = secrets.token_urlsafe(32)
        expiry = time.time() + self.ttl
        with self._lock:
            self._tokens[token] = (learner_id, expiry)
        return token, expiry

    def resolve(self, token: str) -> Optional[str]:
        with self._lock:
            entry = self._tokens.get(token)
            if entry is None:
                return None
            learner_id, expiry = entry
            if time.time() >= expiry:
                del self._tokens[token]
                return None
            return learner_id


class RegisterBody(BaseModel):
    name: str
    password: str
    experience_tier: str
    consent: bool


class LoginBody(BaseModel):
    name: str
    password: str


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def create_app(
    store_path: str,
    ppm: float = 160.0,
    repeats: int = 4,
    fs: int = 44100,
    pass_bound: float = 10.0,
    token_ttl: float = DEFAULT_TOKEN_TTL,
) -> FastAPI:
    store = SessionStore(store_path)
    tokens = _TokenTable(token_ttl)
    cfg = TimingConfig(ppm=ppm, fs=fs, repeats=repeats)
    app = FastAPI(title="rhythmtutor", docs_url=None, redoc_url=None)
    app.state.store = store

    def auth(authorization: str = Header(default="")) -> str:
        scheme, _, token = authorization.partition(" ")
        if scheme.lower() != "bearer" or not token:
            raise _AuthError
        learner_id = tokens.resolve(token)
        if learner_id is None:
            raise _AuthError
        return learner_id

    class _AuthError(Exception):
        pass

    @app.exception_handler(_AuthError)
    async def _unauthorized(request: Request, exc: _AuthError):
        return _error(401, "missing or invalid bearer token")

    def pattern_payload(learner_id: str) -> dict:
        state = store.get_state(learner_id)
        pattern, _ = current_pattern(state, cfg)
        return {
            "pattern_string": str(pattern),
            "cycle_len": pattern.cycle_len,
            "ppm": cfg.ppm,
            "repeats": cfg.repeats,
            "audio_url": f"{API_PREFIX}/pattern/audio",
        }

    @app.post(API_PREFIX + "/register")
    def register(body: RegisterBody):
        if not body.consent:
            return _error(422, "consent is required")
        if body.experience_tier not in EXPERIENCE_TIERS:
            return _error(
                422, f"experience_tier must be one of {', '.join(EXPERIENCE_TIERS)}"
            )
        try:
            profile = store.register(
                display_name=body.name,
                password=body.password,
                experience_tier=body.experience_tier,
                consent=body.consent,
            )
        except DomainError as exc:
            if "already registered" in str(exc):
                return _error(409, str(exc))
            return _error(422, str(exc))
        return JSONResponse(status_code=201, content={"learner_id": profile.learner_id})

    @app.post(API_PREFIX + "/login")
    def login(body: LoginBody):
        learner_id = store.authenticate(body.name, body.password)
        if learner_id is None:
            return _error(401, "invalid credentials")
        token, expiry = tokens.issue(learner_id)
        return {"token": token, "learner_id": learner_id, "expires_at": expiry}

    @app.get(API_PREFIX + "/pattern")
    def get_pattern(learner_id: str = Depends(auth)):
        try:
            return pattern_payload(learner_id)
        except CourseComplete:
            return Response(status_code=204)

    @app.get(API_PREFIX + "/pattern/audio")
    def get_pattern_audio(learner_id: str = Depends(auth)):
        state = store.get_state(learner_id)
        try:
            pattern, _ = current_pattern(state, cfg)
        except CourseComplete:
            return Response(status_code=204)
        audio = render(pattern, cfg)
        return Response(content=wav_bytes(audio), media_type="audio/wav")

    @app.post(API_PREFIX + "/attempt")
    async def post_attempt(request: Request, learner_id: str = Depends(auth)):
        body = await request.body()
        if len(body) > MAX_UPLOAD_BYTES:
            return _error(413, "upload exceeds 32 MiB")
        state = store.get_state(learner_id)
        try:
            pattern, _ = current_pattern(state, cfg)
        except CourseComplete:
            return _error(409, "course complete; nothing to attempt")
        try:
            recording = read_wav_bytes(body)
        except WavFormatError as exc:
            return _error(415, str(exc))
        try:
            result = assess(pattern, cfg, recording, bound=pass_bound)
        except DomainError as exc:
            state = record_failed_attempt(state, exc)
            store.save_state(state)
            return {
                "passed": False,
                "failure_reason": str(exc),
                "failure_stage": exc.stage,
                "attempt_no": state.attempts_on_current,
            }
        state = record_attempt(state, result, auto_advance=False)
        store.save_state(state)
        payload = result.to_dict()
        payload.update(
            failure_reason=None, failure_stage=None, attempt_no=state.attempts_on_current
        )
        return payload

    @app.post(API_PREFIX + "/advance")
    def post_advance(learner_id: str = Depends(auth)):
        state = store.get_state(learner_id)
        if state.complete:
            return _error(409, "course complete")
        pattern, _ = current_pattern(state, cfg)
        last = state.history[-1] if state.history else None
        if last is None or last.pattern != str(pattern) or not last.passed:
            return _error(409, "must pass current pattern")
        state = advance_session(state)
        store.save_state(state)
        if state.complete:
            return {"complete": True, "pattern": None}
        payload = pattern_payload(learner_id)
        return {"complete": False, "pattern": payload}

    @app.get(API_PREFIX + "/progress")
    def get_progress(
        learner_id: str = Depends(auth), for_learner: Optional[str] = None
    ):
        if for_learner is not None and for_learner != learner_id:
            return _error(403, "cannot read another learner's progress")
        try:
            state = store.get_state(learner_id)
        except UnknownLearnerError as exc:
            return _error(404, str(exc))
        return progress_report(state)

    return app
