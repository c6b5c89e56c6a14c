"""Pattern rendering: pulse placement and FFT convolution with a drum hit.

The pulse generator places an onset at ``round(i * ipi)`` for every
global pulse index ``i`` whose pattern symbol is 1 (round-to-nearest per
pulse, so placement error never exceeds half a sample). The unit-impulse
train is then circularly convolved with a short drum impulse via the
DFT, which keeps the output exactly as long as the pulse-generator
output. The wrap-around tail is harmless as long as the impulse decays
within one IPI; a warning is emitted otherwise.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import AudioBuffer, PulseTrain, RhythmPattern, TimingConfig
from .errors import SampleRateMismatchError

_IMPULSE_SEED = 0x5EED


@dataclass(frozen=True)
class DrumImpulse:
    """Short percussive impulse: instantaneous attack, short decay.

    Peak absolute amplitude is normalized to 1 at construction.
    """

    samples: np.ndarray = field(repr=False)
    fs: int

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("impulse must be a non-empty 1-D array")
        peak = np.max(np.abs(arr))
        if peak == 0:
            raise ValueError("impulse is silent")
        arr = arr / peak
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return int(self.samples.size)


def default_impulse(fs: int = 44100) -> DrumImpulse:
    """Built-in synthetic drum hit: 5 ms noise attack, 50 ms exponential decay.

    Deterministic (fixed seed) so repeated renders are byte-identical.
    """
    rng = np.random.default_rng(_IMPULSE_SEED)
    attack_n = max(1, int(round(0.005 * fs)))
    decay_n = max(1, int(round(0.050 * fs)))
    n = attack_n + decay_n
    noise = rng.uniform(-1.0, 1.0, n)
    env = np.empty(n)
    env[:attack_n] = np.linspace(0.0, 1.0, attack_n, endpoint=False) + 1.0 / attack_n
    env[attack_n:] = np.exp(-6.0 * np.arange(decay_n) / decay_n)
    return DrumImpulse(samples=noise * env, fs=fs)


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def generate_pulses(pattern: RhythmPattern, cfg: TimingConfig) -> PulseTrain:
    """Place onsets on the pulse grid for ``cfg.repeats`` cycles."""
    ipi = cfg.ipi
    n = pattern.cycle_len
    positions = [
        _round_half_up(i * ipi)
        for i in range(n * cfg.repeats)
        if pattern.symbols[i % n] == 1
    ]
    total = _round_half_up(n * cfg.repeats * ipi)
    return PulseTrain(onset_positions=tuple(positions), total_samples=total, fs=cfg.fs)


def impulse_signal(train: PulseTrain) -> AudioBuffer:
    """Unit-impulse realization of a pulse train."""
    sig = np.zeros(train.total_samples)
    sig[list(train.onset_positions)] = 1.0
    return AudioBuffer(samples=sig, fs=train.fs)


def convolve_same_length(
    signal: AudioBuffer, impulse: DrumImpulse, normalize: bool = True
) -> AudioBuffer:
    """Circular convolution via the DFT; output length equals input length.

    With ``normalize`` the result is rescaled so the peak magnitude does
    not exceed 1 (quieter signals are left untouched).
    """
    if impulse.fs != signal.fs:
        raise SampleRateMismatchError(
            f"sample-rate mismatch: signal fs={signal.fs}, impulse fs={impulse.fs}"
        )
    n = len(signal)
    if len(impulse) > n:
        raise SampleRateMismatchError(
            f"impulse ({len(impulse)} samples) longer than signal ({n})"
        )
    h = np.zeros(n)
    h[: len(impulse)] = impulse.samples
    out = np.fft.irfft(np.fft.rfft(signal.samples) * np.fft.rfft(h), n=n)
    if normalize:
        peak = np.max(np.abs(out))
        if peak > 1.0:
            out = out / peak
    return AudioBuffer(samples=out, fs=signal.fs)


def render(
    pattern: RhythmPattern, cfg: TimingConfig, impulse: DrumImpulse | None = None
) -> AudioBuffer:
    """Full pipeline: pulses -> unit impulses -> drum convolution."""
    if impulse is None:
        impulse = default_impulse(cfg.fs)
    if len(impulse) > cfg.ipi:
        warnings.warn(
            f"drum impulse ({len(impulse)} samples) longer than one IPI "
            f"({cfg.ipi:.1f} samples); hits will overlap",
            stacklevel=2,
        )
    train = generate_pulses(pattern, cfg)
    return convolve_same_length(impulse_signal(train), impulse)
