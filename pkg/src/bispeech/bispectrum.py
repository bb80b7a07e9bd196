"""
Segment-averaged bispectrum and bicoherence estimates.

A clip of N samples is cut into K non-overlapping segments of length N//K.
Each segment is truncated to ``segment_fft_size`` samples, windowed and
transformed.  From the segment spectra Y_K we form, for k1, k2 in
[0, fft_size/2):

* the averaged triple-product magnitude  mean_K |Y(k1)| |Y(k2)| |Y(k1+k2)|
* the averaged wrapped biphase           mean_K wrap(<Y(k1) + <Y(k2) - <Y(k1+k2))
* the classic bicoherence                |sum_K B_K| / sqrt(sum_K |Y1 Y2|^2 * sum_K |Y3|^2)

Only bins with k1 + k2 < fft_size/2 are kept (``valid_mask``); everything
else is zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dsp
from .audio_io import AudioClip
from .errors import ClipTooShort, DegenerateSignal, TooFewSegments

__all__ = [
    "BispectralConfig",
    "BicoherenceGrid",
    "valid_mask",
    "segment_clip",
    "segment_spectra",
    "segment_bispectrum",
    "averaged_bispectrum",
    "bicoherence",
    "normalize_grid",
    "bispectral_grid",
    "wrap_phase",
    "dump_grid_text",
]


@dataclass(frozen=True)
class BispectralConfig:
    target_segments: int = 100
    segment_fft_size: int = 64
    window: str = dsp.HANN

    def __post_init__(self):
        if self.target_segments < 2:
            raise ValueError("target_segments must be >= 2")
        if self.segment_fft_size < 8 or not dsp.is_power_of_two(self.segment_fft_size):
            raise ValueError("segment_fft_size must be a power of two >= 8")
        dsp.window(self.window, 1)

    @property
    def half(self) -> int:
        return self.segment_fft_size // 2


@dataclass(frozen=True)
class BicoherenceGrid:
    """Magnitude and phase over (k1, k2); ``normalized`` tells which scale."""

    magnitude: np.ndarray
    phase: np.ndarray
    valid_mask: np.ndarray
    normalized: bool = False

    def valid_values(self):
        """Row-major flattened (magnitude, phase) over valid bins."""
        return self.magnitude[self.valid_mask], self.phase[self.valid_mask]


def valid_mask(fft_size: int) -> np.ndarray:
    h = fft_size // 2
    k = np.arange(h)
    return (k[:, None] + k[None, :]) < h


_BRANCH_TOL = 1e-12


def wrap_phase(phi):
    """Map angles to (-pi, pi].

    Results within 1e-12 rad above -pi snap to pi.  A biphase that is exactly
    pi in theory (the DC row when Y(0) < 0) otherwise lands on either side
    of the cut depending on the last bit of the angle sum.
    """
    w = np.pi - np.mod(np.pi - np.asarray(phi, dtype=np.float64), 2.0 * np.pi)
    return np.where(w <= -np.pi + _BRANCH_TOL, np.pi, w)


def segment_clip(clip: AudioClip, config: BispectralConfig = BispectralConfig()) -> np.ndarray:
    """Cut the clip into up to ``target_segments`` equal non-overlapping segments.

    Segment length is N // K.  When that is shorter than the FFT size the
    segment length grows to ``min(fft_size, N // 2)`` so at least two
    segments remain; trailing samples are dropped.
    """
    x = np.asarray(clip.samples, dtype=np.float64)
    n, fft_size = len(x), config.segment_fft_size
    if n < 2 * fft_size:
        raise ClipTooShort(f"clip has {n} samples, need at least {2 * fft_size}")
    seg_len = n // config.target_segments
    if seg_len < fft_size:
        seg_len = min(fft_size, n // 2)
    count = min(config.target_segments, n // seg_len)
    return x[: count * seg_len].reshape(count, seg_len)


def segment_spectra(segments, config: BispectralConfig = BispectralConfig()) -> np.ndarray:
    """Truncate each segment to the FFT size, window it, zero-pad and transform."""
    segs = np.atleast_2d(np.asarray(segments, dtype=np.float64))
    kept = segs[:, : config.segment_fft_size]
    w = dsp.window(config.window, kept.shape[1])
    spectra = dsp.fft(kept * w, config.segment_fft_size)
    # the DC bin of a real input is real; roundoff would otherwise leave a
    # +-0 imaginary part whose sign flips its angle between pi and -pi
    spectra[:, 0] = spectra[:, 0].real
    return spectra


def _triple_indices(fft_size: int):
    k = np.arange(fft_size // 2)
    return k[:, None], k[None, :], k[:, None] + k[None, :]


def segment_bispectrum(spectrum) -> np.ndarray:
    """Y(k1) Y(k2) conj(Y(k1+k2)) over the valid triangle; zeros elsewhere."""
    y = np.asarray(spectrum)
    fft_size = y.shape[-1]
    k1, k2, k3 = _triple_indices(fft_size)
    b = y[..., k1] * y[..., k2] * np.conj(y[..., k3])
    return np.where(valid_mask(fft_size), b, 0)


def _symmetrize(m):
    # complex products are not bit-commutative under FMA; (M + M.T)/2 is
    return 0.5 * (m + m.T)


def _mean_over_segments(values: np.ndarray) -> np.ndarray:
    # segment axis moved last and made contiguous so numpy sums pairwise
    return np.ascontiguousarray(np.moveaxis(values, 0, -1)).sum(axis=-1) / values.shape[0]


def _spectra_checked(segments, config):
    spectra = segment_spectra(segments, config)
    if spectra.shape[0] < 2:
        raise TooFewSegments(f"need at least 2 segments, got {spectra.shape[0]}")
    return spectra


def averaged_bispectrum(segments, config: BispectralConfig = BispectralConfig()) -> BicoherenceGrid:
    """Raw segment-averaged magnitude and wrapped biphase grids."""
    spectra = _spectra_checked(segments, config)
    mask = valid_mask(config.segment_fft_size)
    k1, k2, k3 = _triple_indices(config.segment_fft_size)
    amp = np.abs(spectra)
    ang = np.angle(spectra)
    mag = _symmetrize(_mean_over_segments(amp[:, k1] * amp[:, k2] * amp[:, k3]))
    phase = _symmetrize(_mean_over_segments(wrap_phase(ang[:, k1] + ang[:, k2] - ang[:, k3])))
    return BicoherenceGrid(np.where(mask, mag, 0.0), np.where(mask, phase, 0.0), mask)


def bicoherence(segments, config: BispectralConfig = BispectralConfig()) -> np.ndarray:
    """Classic bicoherence with numerator and denominator averaged separately."""
    spectra = _spectra_checked(segments, config)
    mask = valid_mask(config.segment_fft_size)
    k1, k2, k3 = _triple_indices(config.segment_fft_size)
    pair = spectra[:, k1] * spectra[:, k2]
    third = spectra[:, k3]
    num = np.abs(_mean_over_segments(pair * np.conj(third)))
    den = np.sqrt(
        _mean_over_segments(np.abs(pair) ** 2) * _mean_over_segments(np.abs(third) ** 2)
    )
    with np.errstate(invalid="ignore", divide="ignore"):
        b = np.where(den > 0, num / den, 0.0)
    # Cauchy-Schwarz bounds b by 1; clip the rounding excess
    return _symmetrize(np.where(mask, np.clip(b, 0.0, 1.0), 0.0))


def normalize_grid(grid: BicoherenceGrid) -> BicoherenceGrid:
    """Min-max the magnitude over valid bins; map phase (-pi, pi] -> [0, 1]."""
    if grid.normalized:
        return grid
    mask = grid.valid_mask
    vals = grid.magnitude[mask]
    lo, hi = vals.min(), vals.max()
    if hi > lo:
        mag = (grid.magnitude - lo) / (hi - lo)
    else:
        mag = np.zeros_like(grid.magnitude)
    phase = (grid.phase + np.pi) / (2.0 * np.pi)
    return BicoherenceGrid(
        np.where(mask, np.clip(mag, 0.0, 1.0), 0.0),
        np.where(mask, np.clip(phase, 0.0, 1.0), 0.0),
        mask,
        normalized=True,
    )


def bispectral_grid(
    clip: AudioClip, config: BispectralConfig = BispectralConfig(), normalized: bool = True
) -> BicoherenceGrid:
    """Segment ``clip`` and return its (normalized) averaged grids."""
    segments = segment_clip(clip, config)
    if not np.any(segments[:, : config.segment_fft_size]):
        raise DegenerateSignal("clip carries no energy in any analysed segment")
    grid = averaged_bispectrum(segments, config)
    return normalize_grid(grid) if normalized else grid


def dump_grid_text(matrix, path=None) -> str:
    """Row-major text dump, one line per row, values in ``repr`` precision."""
    text = "".join(" ".join(repr(float(v)) for v in row) + "\n" for row in np.asarray(matrix))
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text
