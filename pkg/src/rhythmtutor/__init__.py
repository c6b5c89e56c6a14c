"""Rhythm training engine: pattern synthesis, complexity-ordered
curricula, performance assessment, learner sessions, and an HTTP service.
"""

from .assessment import (
    AssessmentResult,
    ErrorMatrix,
    OnsetList,
    assess,
    build_error_matrix,
    detect_onsets,
    rectify,
)
from .complexity import (
    ComplexityScore,
    adjusted_complexity,
    clave_son,
    enumerate_curriculum,
    h_code,
)
from .core import (
    AudioBuffer,
    PulseTrain,
    RhythmPattern,
    TimingConfig,
    compute_ipi,
    parse_pattern,
    render_pattern,
)
from .errors import CourseComplete, DomainError
from .session import (
    LearnerProfile,
    SessionState,
    SessionStore,
    advance_session,
    current_pattern,
    progress_report,
    record_attempt,
)
from .synthesis import DrumImpulse, default_impulse, generate_pulses, render
from .wav_io import read_wav, read_wav_bytes, wav_bytes, write_wav

__version__ = "1.0.0"

__all__ = [
    "AssessmentResult",
    "AudioBuffer",
    "ComplexityScore",
    "CourseComplete",
    "DomainError",
    "DrumImpulse",
    "ErrorMatrix",
    "LearnerProfile",
    "OnsetList",
    "PulseTrain",
    "RhythmPattern",
    "SessionState",
    "SessionStore",
    "TimingConfig",
    "adjusted_complexity",
    "advance_session",
    "assess",
    "build_error_matrix",
    "clave_son",
    "compute_ipi",
    "current_pattern",
    "default_impulse",
    "detect_onsets",
    "enumerate_curriculum",
    "generate_pulses",
    "h_code",
    "parse_pattern",
    "progress_report",
    "read_wav",
    "read_wav_bytes",
    "record_attempt",
    "rectify",
    "render",
    "render_pattern",
    "wav_bytes",
    "write_wav",
]
