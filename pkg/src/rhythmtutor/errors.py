"""Error types shared across the engine.

Every domain failure derives from :class:`DomainError` so the CLI can map
them to exit code 1 and the service can translate them to structured
failure payloads. ``stage`` identifies which assessment stage raised,
when applicable.
"""

from __future__ import annotations


class DomainError(Exception):
    """A request that is well-formed but semantically invalid."""

    stage: str | None = None


class PatternError(DomainError):
    """Malformed rhythm pattern text or symbols."""


class SilentPatternError(PatternError):
    """Pattern contains no onsets."""


class TimingError(DomainError):
    """Non-positive tempo, sampling rate, or repeat count."""


class SampleRateMismatchError(DomainError):
    """Signal and impulse (or recording and session) disagree on fs."""


class SilentRecordingError(DomainError):
    stage = "rectify"


class NoOnsetsError(DomainError):
    stage = "detect"


class OnsetCountMismatchError(DomainError):
    stage = "match"

    def __init__(self, expected: int, got: int):
        super().__init__(f"onset count mismatch: expected {expected}, got {got}")
        self.expected = expected
        self.got = got


class EnumerationTooLargeError(DomainError):
    """Cycle length above the curriculum enumeration bound."""


class CourseComplete(Exception):
    """Signal: the learner has exhausted the configured curriculum."""


class StaleAttemptError(DomainError):
    """Attempt recorded against a pattern the session has already left."""


class UnknownLearnerError(DomainError):
    pass


class WavFormatError(DomainError):
    """Input bytes are not a decodable 16-bit PCM WAV."""
