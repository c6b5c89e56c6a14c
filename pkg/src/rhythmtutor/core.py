"""Domain types and timing arithmetic.

A rhythm is a cyclic binary sequence: 1 marks an onset on a pulse, 0 a
silent pulse. Tempo is expressed in pulses per minute (PPM); the
inter-pulse interval (IPI) in samples is ``60 * fs / ppm`` and is kept
as a real number — rounding happens per pulse at placement time, so the
placement error is bounded by half a sample everywhere instead of
drifting cumulatively.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PatternError, SilentPatternError, TimingError

_SEPARATORS = set(" ,;[]()\t\n\r")


def compute_ipi(ppm: float, fs: float) -> float:
    """Inter-pulse interval in samples (real-valued, not rounded)."""
    if ppm <= 0 or fs <= 0:
        raise TimingError(f"ppm and fs must be positive, got ppm={ppm}, fs={fs}")
    return 60.0 * fs / ppm


@dataclass(frozen=True)
class RhythmPattern:
    """Cyclic binary onset/silence sequence."""

    symbols: tuple[int, ...]

    def __post_init__(self):
        if any(s not in (0, 1) for s in self.symbols):
            raise PatternError(f"symbols must be 0 or 1, got {self.symbols!r}")
        if len(self.symbols) < 2:
            raise PatternError("cycle length must be at least 2")
        if not any(self.symbols):
            raise SilentPatternError("silent pattern: no onsets")

    @property
    def cycle_len(self) -> int:
        return len(self.symbols)

    @property
    def onset_count(self) -> int:
        return sum(self.symbols)

    @property
    def starts_on_beat(self) -> bool:
        return self.symbols[0] == 1

    def complement(self) -> "RhythmPattern":
        """Flip every symbol. Only valid if the result is non-silent."""
        return RhythmPattern(tuple(1 - s for s in self.symbols))

    def rotated(self, k: int) -> "RhythmPattern":
        k %= self.cycle_len
        return RhythmPattern(self.symbols[k:] + self.symbols[:k])

    def __str__(self) -> str:
        return render_pattern(self)


def parse_pattern(text: str) -> RhythmPattern:
    """Parse '0'/'1' text; spaces, commas and brackets are separators."""
    cleaned = [c for c in text if c not in _SEPARATORS]
    if not cleaned:
        raise PatternError("empty pattern text")
    bad = sorted({c for c in cleaned if c not in "01"})
    if bad:
        raise PatternError(f"invalid pattern characters: {bad}")
    return RhythmPattern(tuple(int(c) for c in cleaned))


def render_pattern(pattern: RhythmPattern) -> str:
    return "".join(str(s) for s in pattern.symbols)


@dataclass(frozen=True)
class TimingConfig:
    """Tempo, sampling rate and repeat count for one rendered take."""

    ppm: float = 160.0
    fs: int = 44100
    repeats: int = 4

    def __post_init__(self):
        if self.ppm <= 0:
            raise TimingError(f"ppm must be positive, got {self.ppm}")
        if self.fs <= 0:
            raise TimingError(f"fs must be positive, got {self.fs}")
        if self.repeats <= 0:
            raise TimingError(f"repeats must be positive, got {self.repeats}")

    @property
    def ipi(self) -> float:
        return compute_ipi(self.ppm, self.fs)


@dataclass(frozen=True)
class PulseTrain:
    """Resolved onset sample positions for a pattern at a tempo."""

    onset_positions: tuple[int, ...]
    total_samples: int
    fs: int

    def __post_init__(self):
        if self.total_samples <= 0:
            raise TimingError("total_samples must be positive")
        pos = self.onset_positions
        if any(p < 0 or p >= self.total_samples for p in pos):
            raise TimingError("onset positions out of range")
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise TimingError("onset positions must be strictly increasing")


@dataclass(frozen=True)
class AudioBuffer:
    """Mono audio, float amplitudes nominally in [-1, 1]."""

    samples: np.ndarray = field(repr=False)
    fs: int

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("samples must be a non-empty 1-D array")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)
        if self.fs <= 0:
            raise ValueError("fs must be positive")

    def __len__(self) -> int:
        return int(self.samples.size)
