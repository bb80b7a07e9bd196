"""
Read and write RIFF/WAVE audio as :class:`AudioClip` objects.

Supported encodings on read: unsigned 8-bit, signed 16/24/32-bit PCM and
IEEE float-32, including WAVE_FORMAT_EXTENSIBLE wrappers around those.
Writing always produces 16-bit PCM.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyAudio, IoFailure, LengthMismatch, MalformedContainer, UnsupportedEncoding

__all__ = ["AudioClip", "load_wav", "write_wav", "to_mono", "trim", "prepare"]

WAVE_FORMAT_PCM = 0x0001
WAVE_FORMAT_IEEE_FLOAT = 0x0003
WAVE_FORMAT_EXTENSIBLE = 0xFFFE

DEFAULT_MAX_SECONDS = 5.0


@dataclass(frozen=True)
class AudioClip:
    """Decoded audio.

    ``samples`` is a 1-D float64 array in [-1, 1].  When ``channels > 1`` the
    array is interleaved frame by frame; :func:`to_mono` collapses it.
    """

    samples: np.ndarray
    sample_rate: int
    source_path: str = ""
    channels: int = 1

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if self.channels < 1:
            raise ValueError(f"channels must be >= 1, got {self.channels}")

    @property
    def n_frames(self) -> int:
        return len(self.samples) // self.channels

    @property
    def duration(self) -> float:
        return self.n_frames / self.sample_rate


def _iter_chunks(data: bytes):
    pos = 12
    while pos + 8 <= len(data):
        cid, size = struct.unpack_from("<4sI", data, pos)
        body = data[pos + 8 : pos + 8 + size]
        if len(body) < size:
            raise MalformedContainer(
                f"chunk {cid!r} declares {size} bytes but only {len(body)} remain"
            )
        yield cid, body
        pos += 8 + size + (size & 1)


def _decode(body: bytes, fmt_tag: int, bits: int) -> np.ndarray:
    if fmt_tag == WAVE_FORMAT_IEEE_FLOAT:
        if bits != 32:
            raise UnsupportedEncoding(f"float WAV with {bits} bits is not supported")
        x = np.frombuffer(body, dtype="<f4").astype(np.float64)
        # float files may overshoot full scale
        return np.clip(np.nan_to_num(x), -1.0, 1.0)
    if bits == 8:
        return (np.frombuffer(body, dtype=np.uint8).astype(np.float64) - 128.0) / 128.0
    if bits == 16:
        return np.frombuffer(body, dtype="<i2").astype(np.float64) / 32768.0
    if bits == 24:
        raw = np.frombuffer(body, dtype=np.uint8).reshape(-1, 3).astype(np.int32)
        v = raw[:, 0] | (raw[:, 1] << 8) | (raw[:, 2] << 16)
        v = np.where(v >= 1 << 23, v - (1 << 24), v)
        return v.astype(np.float64) / float(1 << 23)
    if bits == 32:
        return np.frombuffer(body, dtype="<i4").astype(np.float64) / float(1 << 31)
    raise UnsupportedEncoding(f"PCM with {bits} bits per sample is not supported")


def load_wav(path) -> AudioClip:
    """Decode a WAV file, keeping all channels interleaved."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc.strerror or exc}") from None
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise MalformedContainer(f"{path}: not a RIFF/WAVE file")

    fmt = None
    body = None
    for cid, chunk in _iter_chunks(data):
        if cid == b"fmt ":
            if len(chunk) < 16:
                raise MalformedContainer(f"{path}: fmt chunk too short")
            fmt = struct.unpack_from("<HHIIHH", chunk, 0)
            if fmt[0] == WAVE_FORMAT_EXTENSIBLE:
                if len(chunk) < 40:
                    raise MalformedContainer(f"{path}: truncated extensible fmt chunk")
                sub = struct.unpack_from("<H", chunk, 24)[0]
                fmt = (sub,) + fmt[1:]
        elif cid == b"data":
            body = chunk
    if fmt is None or body is None:
        raise MalformedContainer(f"{path}: missing fmt or data chunk")

    fmt_tag, channels, rate, _, block_align, bits = fmt
    if fmt_tag not in (WAVE_FORMAT_PCM, WAVE_FORMAT_IEEE_FLOAT):
        raise UnsupportedEncoding(f"{path}: format tag 0x{fmt_tag:04x} is compressed or unknown")
    if channels < 1 or rate < 1 or bits % 8 or block_align != channels * bits // 8:
        raise MalformedContainer(f"{path}: inconsistent fmt chunk {fmt}")
    n_frames = len(body) // block_align
    if n_frames == 0:
        raise EmptyAudio(f"{path}: data chunk holds no frames")
    samples = _decode(body[: n_frames * block_align], fmt_tag, bits)
    return AudioClip(samples, rate, str(path), channels)


def write_wav(path, clip: AudioClip) -> None:
    """Write ``clip`` as 16-bit PCM (x -> round(x * 32768), clipped)."""
    pcm = np.clip(np.round(np.asarray(clip.samples) * 32768.0), -32768, 32767).astype("<i2")
    payload = pcm.tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(payload), b"WAVE",
        b"fmt ", 16, WAVE_FORMAT_PCM, clip.channels, clip.sample_rate,
        clip.sample_rate * clip.channels * 2, clip.channels * 2, 16,
        b"data", len(payload),
    )
    try:
        Path(path).write_bytes(header + payload)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc.strerror or exc}") from None


def to_mono(clip: AudioClip, channel_count: int | None = None) -> AudioClip:
    """Average interleaved channels frame by frame."""
    n = clip.channels if channel_count is None else channel_count
    if len(clip.samples) % n:
        raise LengthMismatch(f"{len(clip.samples)} samples do not split into {n} channels")
    if n == 1:
        return AudioClip(clip.samples, clip.sample_rate, clip.source_path, 1)
    mono = clip.samples.reshape(-1, n).mean(axis=1)
    return AudioClip(mono, clip.sample_rate, clip.source_path, 1)


def trim(clip: AudioClip, max_seconds: float = DEFAULT_MAX_SECONDS) -> AudioClip:
    """Keep at most ``round(max_seconds * sample_rate)`` frames from the head."""
    if max_seconds <= 0:
        raise ValueError("max_seconds must be positive")
    keep = int(round(max_seconds * clip.sample_rate)) * clip.channels
    if keep >= len(clip.samples):
        return clip
    return AudioClip(clip.samples[:keep], clip.sample_rate, clip.source_path, clip.channels)


def prepare(path, max_seconds: float | None = DEFAULT_MAX_SECONDS) -> AudioClip:
    """Load, mix down to mono and trim: the standard preprocessing chain."""
    clip = to_mono(load_wav(path))
    return clip if max_seconds is None else trim(clip, max_seconds)
