"""Performance assessment: rectification, onset detection, error matrix.

A recording is full-wave rectified with a noise gate at a quarter of the
peak, onsets are picked from an energy-envelope novelty curve, and the
performed inter-onset intervals are compared to the generated ones. The
deviation at onset j is ``100 * (IOI_gen[j] - IOI_in[j]) / IOI_gen[j]``
(percent of the generated interval, clamped to [-100, 100]); positive
means the learner played that interval short, i.e. rushed. Deviations
fill an R x K matrix (cycles x onsets-per-cycle) whose (0,0) entry is
the alignment anchor and is defined as 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import AudioBuffer, RhythmPattern, TimingConfig
from .errors import (
    DomainError,
    NoOnsetsError,
    OnsetCountMismatchError,
    SampleRateMismatchError,
    SilentRecordingError,
)
from .synthesis import generate_pulses

DEFAULT_PASS_BOUND = 10.0  # percent, on both average arrays

_FRAME = 512
_HOP = 128


@dataclass(frozen=True)
class OnsetList:
    positions: tuple[int, ...]
    fs: int

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.positions, self.positions[1:])):
            raise DomainError("onset positions must be strictly increasing")

    def __len__(self) -> int:
        return len(self.positions)


@dataclass(frozen=True)
class ErrorMatrix:
    """R x K grid of IOI deviation percentages."""

    values: tuple[tuple[float, ...], ...]

    @property
    def rows(self) -> int:
        return len(self.values)

    @property
    def cols(self) -> int:
        return len(self.values[0])

    def __post_init__(self):
        if not self.values or any(len(r) != len(self.values[0]) for r in self.values):
            raise DomainError("matrix rows must be non-empty and equal length")
        if self.values[0][0] != 0.0:
            raise DomainError("entry (0,0) must be the anchor zero")


@dataclass(frozen=True)
class AssessmentResult:
    matrix: ErrorMatrix
    per_onset_avg: tuple[float, ...]
    per_cycle_avg: tuple[float, ...]
    passed: bool
    bounds_used: float

    def to_dict(self) -> dict:
        return {
            "matrix": [list(row) for row in self.matrix.values],
            "per_onset_avg": list(self.per_onset_avg),
            "per_cycle_avg": list(self.per_cycle_avg),
            "passed": self.passed,
            "bounds_used": self.bounds_used,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AssessmentResult":
        return cls(
            matrix=ErrorMatrix(tuple(tuple(row) for row in data["matrix"])),
            per_onset_avg=tuple(data["per_onset_avg"]),
            per_cycle_avg=tuple(data["per_cycle_avg"]),
            passed=bool(data["passed"]),
            bounds_used=float(data["bounds_used"]),
        )


def rectify(recording: AudioBuffer) -> AudioBuffer:
    """Full-wave rectify, gating everything below a quarter of the peak."""
    mag = np.abs(recording.samples)
    peak = float(mag.max())
    if peak == 0.0:
        raise SilentRecordingError("silent recording")
    gated = np.where(mag >= peak / 4.0, mag, 0.0)
    return AudioBuffer(samples=gated, fs=recording.fs)


def _frame_rms(x: np.ndarray, frame: int, hop: int) -> np.ndarray:
    n_frames = max(1, 1 + (len(x) - frame) // hop) if len(x) >= frame else 1
    out = np.empty(n_frames)
    for i in range(n_frames):
        seg = x[i * hop : i * hop + frame]
        out[i] = np.sqrt(np.mean(seg * seg)) if seg.size else 0.0
    return out


def _refine_to_rise(x: np.ndarray, frame_start: int, frame: int, hop: int) -> int:
    """First sample at or above a quarter of the local max near the frame."""
    lo = max(0, frame_start - hop)
    hi = min(len(x), frame_start + frame)
    window = x[lo:hi]
    peak = window.max()
    if peak <= 0:
        return frame_start
    idx = int(np.argmax(window >= 0.25 * peak))
    return lo + idx


def detect_onsets(
    rectified: AudioBuffer,
    refractory: int,
    frame: int = _FRAME,
    hop: int = _HOP,
) -> OnsetList:
    """Energy-envelope onset detector.

    Per-frame RMS -> half-wave-differenced novelty -> peaks above
    median + 1.5 * IQR of the novelty, refractory gap enforced, each
    pick refined to the local energy-rise sample.
    """
    x = rectified.samples
    rms = _frame_rms(x, frame, hop)
    novelty = np.maximum(0.0, np.diff(rms, prepend=0.0))
    q1, med, q3 = np.percentile(novelty, [25, 50, 75])
    threshold = med + 1.5 * (q3 - q1)
    picks: list[int] = []
    for f in range(len(novelty)):
        v = novelty[f]
        if v <= threshold or v <= 0.0:
            continue
        if f > 0 and novelty[f - 1] > v:
            continue
        if f + 1 < len(novelty) and novelty[f + 1] > v:
            continue
        onset = _refine_to_rise(x, f * hop, frame, hop)
        if picks and onset - picks[-1] < refractory:
            continue
        picks.append(onset)
    if not picks:
        raise NoOnsetsError("no onsets detected")
    return OnsetList(positions=tuple(picks), fs=rectified.fs)


def build_error_matrix(
    generated: OnsetList, performed: OnsetList, onsets_per_cycle: int, cycles: int
) -> ErrorMatrix:
    """Deviation matrix over K x R onsets; raises on count mismatch."""
    expected = onsets_per_cycle * cycles
    if len(generated) != expected:
        raise OnsetCountMismatchError(expected, len(generated))
    if len(performed) != expected:
        raise OnsetCountMismatchError(expected, len(performed))
    gen = np.asarray(generated.positions, dtype=np.float64)
    perf = np.asarray(performed.positions, dtype=np.float64)
    deviations = np.zeros(expected)
    ioi_gen = np.diff(gen)
    ioi_in = np.diff(perf)
    deviations[1:] = np.clip(100.0 * (ioi_gen - ioi_in) / ioi_gen, -100.0, 100.0)
    rows = deviations.reshape(cycles, onsets_per_cycle)
    return ErrorMatrix(values=tuple(tuple(float(v) for v in row) for row in rows))


def aggregate(matrix: ErrorMatrix, bound: float = DEFAULT_PASS_BOUND) -> AssessmentResult:
    """Column and row means plus the pass verdict against ``bound``."""
    grid = np.asarray(matrix.values)
    per_onset = tuple(float(v) for v in grid.mean(axis=0))
    per_cycle = tuple(float(v) for v in grid.mean(axis=1))
    passed = all(abs(v) <= bound for v in per_onset) and all(
        abs(v) <= bound for v in per_cycle
    )
    return AssessmentResult(
        matrix=matrix,
        per_onset_avg=per_onset,
        per_cycle_avg=per_cycle,
        passed=passed,
        bounds_used=bound,
    )


def _tag_stage(exc: DomainError, stage: str) -> DomainError:
    if exc.stage is None:
        exc.stage = stage
    return exc


def assess(
    pattern: RhythmPattern,
    cfg: TimingConfig,
    recording: AudioBuffer,
    bound: float = DEFAULT_PASS_BOUND,
) -> AssessmentResult:
    """Score a recording against the generated reference for ``pattern``."""
    if recording.fs != cfg.fs:
        if abs(recording.fs - cfg.fs) / cfg.fs > 0.001:
            raise SampleRateMismatchError(
                f"recording fs {recording.fs} differs from session fs {cfg.fs} "
                "by more than 0.1%"
            )
        recording = AudioBuffer(samples=recording.samples, fs=cfg.fs)
    train = generate_pulses(pattern, cfg)
    reference = OnsetList(positions=train.onset_positions, fs=cfg.fs)
    refractory = int(cfg.ipi / 4)
    try:
        rectified = rectify(recording)
        performed = detect_onsets(rectified, refractory=refractory)
        matrix = build_error_matrix(
            reference, performed, onsets_per_cycle=pattern.onset_count, cycles=cfg.repeats
        )
    except DomainError as exc:
        raise _tag_stage(exc, "assess")
    return aggregate(matrix, bound=bound)
