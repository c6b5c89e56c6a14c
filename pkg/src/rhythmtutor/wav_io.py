"""WAV read/write: 16-bit signed PCM, little-endian.

Writing is always mono at the buffer's fs. Reading accepts multi-channel
files and mixes down by channel averaging. Only 16-bit PCM is decoded;
anything else raises WavFormatError rather than guessing.
"""

from __future__ import annotations

import io
import wave

import numpy as np

from .core import AudioBuffer
from .errors import WavFormatError

_FULL_SCALE = 32767.0


def write_wav(path_or_file, buffer: AudioBuffer) -> None:
    samples = np.clip(buffer.samples, -1.0, 1.0)
    pcm = np.round(samples * _FULL_SCALE).astype("<i2")
    with wave.open(path_or_file, "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(buffer.fs)
        wf.writeframes(pcm.tobytes())


def wav_bytes(buffer: AudioBuffer) -> bytes:
    bio = io.BytesIO()
    write_wav(bio, buffer)
    return bio.getvalue()


def read_wav(path_or_file) -> AudioBuffer:
    try:
        with wave.open(path_or_file, "rb") as wf:
            nch = wf.getnchannels()
            width = wf.getsampwidth()
            fs = wf.getframerate()
            nframes = wf.getnframes()
            raw = wf.readframes(nframes)
    except (wave.Error, EOFError, OSError) as exc:
        raise WavFormatError(f"not a decodable WAV: {exc}") from exc
    if width != 2:
        raise WavFormatError(f"only 16-bit PCM supported, got {8 * width}-bit")
    if nframes == 0:
        raise WavFormatError("empty WAV")
    data = np.frombuffer(raw, dtype="<i2").astype(np.float64) / _FULL_SCALE
    if nch > 1:
        data = data.reshape(-1, nch).mean(axis=1)
    return AudioBuffer(samples=data, fs=fs)


def read_wav_bytes(blob: bytes) -> AudioBuffer:
    return read_wav(io.BytesIO(blob))
