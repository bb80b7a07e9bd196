"""Mel spectrograms, MFCCs and their first/second frame differences."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dsp
from .audio_io import AudioClip
from .errors import ClipTooShort, DegenerateBand

__all__ = [
    "CepstralConfig",
    "MfccMatrix",
    "LOG_FLOOR",
    "hz_to_mel",
    "mel_to_hz",
    "build_filterbank",
    "filter_peaks_hz",
    "mel_spectrogram",
    "mfcc",
    "delta",
    "delta2",
    "save_matrix_text",
]

LOG_FLOOR = 1e-10


@dataclass(frozen=True)
class CepstralConfig:
    frame_len_ms: float = 25.0
    hop_ms: float = 10.0
    n_mels: int = 26
    n_coeffs: int = 13
    fmin: float = 0.0
    fmax: float | None = None  # None -> sample_rate / 2
    pre_emphasis: float = 0.97

    def __post_init__(self):
        if self.frame_len_ms <= 0 or self.hop_ms <= 0:
            raise ValueError("frame_len_ms and hop_ms must be positive")
        if not 1 <= self.n_coeffs <= self.n_mels:
            raise ValueError("need 1 <= n_coeffs <= n_mels")
        if self.fmin < 0 or (self.fmax is not None and self.fmax <= self.fmin):
            raise ValueError("need 0 <= fmin < fmax")
        if not 0.0 <= self.pre_emphasis < 1.0:
            raise ValueError("pre_emphasis must lie in [0, 1)")

    def frame_params(self, sample_rate: int):
        """(frame_len, hop, fft_size) in samples for ``sample_rate``."""
        frame_len = max(1, int(round(self.frame_len_ms * sample_rate / 1000.0)))
        hop = max(1, int(round(self.hop_ms * sample_rate / 1000.0)))
        return frame_len, hop, dsp.next_power_of_two(frame_len)

    def band(self, sample_rate: int):
        nyquist = sample_rate / 2.0
        fmax = nyquist if self.fmax is None else self.fmax
        if fmax > nyquist or fmax <= self.fmin:
            raise DegenerateBand(f"band [{self.fmin}, {fmax}] Hz invalid at {sample_rate} Hz")
        return self.fmin, fmax


@dataclass(frozen=True)
class MfccMatrix:
    coeffs: np.ndarray  # frames x n_coeffs
    frame_times: np.ndarray  # seconds, frame starts

    @property
    def shape(self):
        return self.coeffs.shape


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def filter_peaks_hz(config: CepstralConfig, sample_rate: int) -> np.ndarray:
    """Centre frequencies of the filters, with the two band edges at each end."""
    fmin, fmax = config.band(sample_rate)
    mels = np.linspace(hz_to_mel(fmin), hz_to_mel(fmax), config.n_mels + 2)
    return mel_to_hz(mels)


def build_filterbank(config: CepstralConfig, fft_size: int, sample_rate: int) -> np.ndarray:
    """Triangular filters, shape ``(n_mels, fft_size // 2 + 1)``, peak weight 1.

    Filter m rises from edge m to peak m+1 and falls to edge m+2, in Hz,
    sampled at the bin centre frequencies.
    """
    points = filter_peaks_hz(config, sample_rate)
    freqs = np.arange(fft_size // 2 + 1) * sample_rate / fft_size
    lo, mid, hi = points[:-2, None], points[1:-1, None], points[2:, None]
    rising = (freqs[None, :] - lo) / (mid - lo)
    falling = (hi - freqs[None, :]) / (hi - mid)
    weights = np.maximum(0.0, np.minimum(rising, falling))
    empty = np.flatnonzero(~weights.any(axis=1))
    if empty.size:
        raise DegenerateBand(
            f"filters {empty.tolist()} cover no FFT bin; widen the band or reduce n_mels"
        )
    weights.setflags(write=False)
    return weights


def _frames(clip: AudioClip, config: CepstralConfig):
    frame_len, hop, fft_size = config.frame_params(clip.sample_rate)
    frames = dsp.frame_signal(clip.samples, frame_len, hop)
    if frames.shape[0] == 0:
        raise ClipTooShort(f"clip of {len(clip.samples)} samples is shorter than one frame ({frame_len})")
    return frames, hop, fft_size


def mel_spectrogram(clip: AudioClip, config: CepstralConfig = CepstralConfig()) -> np.ndarray:
    """Log mel power, shape ``(frames, n_mels)``."""
    frames, _, fft_size = _frames(clip, config)
    a = config.pre_emphasis
    emph = frames.copy()
    emph[:, 1:] -= a * frames[:, :-1]
    emph *= dsp.window(dsp.HANN, frames.shape[1])
    power = dsp.power_spectrum(dsp.fft(emph, fft_size))[:, : fft_size // 2 + 1]
    fb = build_filterbank(config, fft_size, clip.sample_rate)
    return np.log(power @ fb.T + LOG_FLOOR)


def mfcc(clip: AudioClip, config: CepstralConfig = CepstralConfig()) -> MfccMatrix:
    logmel = mel_spectrogram(clip, config)
    _, hop, _ = config.frame_params(clip.sample_rate)
    coeffs = dsp.dct_ii(logmel)[:, : config.n_coeffs]
    times = np.arange(coeffs.shape[0]) * hop / clip.sample_rate
    return MfccMatrix(coeffs, times)


def delta(matrix: MfccMatrix) -> MfccMatrix:
    """First difference along time; the first frame is zero."""
    c = matrix.coeffs
    out = np.zeros_like(c)
    out[1:] = c[1:] - c[:-1]
    return MfccMatrix(out, matrix.frame_times)


def delta2(matrix: MfccMatrix) -> MfccMatrix:
    return delta(delta(matrix))


def save_matrix_text(matrix, path=None, fmt: str = "%.12e") -> str:
    """One frame per line, space separated."""
    rows = np.atleast_2d(np.asarray(getattr(matrix, "coeffs", matrix)))
    text = "".join(" ".join(fmt % v for v in row) + "\n" for row in rows)
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text
