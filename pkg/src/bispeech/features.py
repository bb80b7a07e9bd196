"""
The 14 numeric features (plus label) describing one speech clip.

Entries 1-8 are mean, variance, skewness and kurtosis of the normalized
bispectral magnitude grid and then of the normalized phase grid, taken over
valid bins only.  Entries 9-14 are mean and variance of all entries of the
MFCC, delta and delta-delta matrices.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import bispectrum, cepstral
from .audio_io import AudioClip
from .bispectrum import BispectralConfig
from .cepstral import CepstralConfig
from .errors import DegenerateSignal, EmptyInput, FormatError

__all__ = [
    "FEATURE_NAMES",
    "BICO_COLUMNS",
    "LABELS",
    "BINARY_LABELS",
    "Moments",
    "FeatureVector",
    "moments",
    "extract_features",
    "write_feature_csv",
    "read_feature_csv",
]

FEATURE_NAMES = (
    "mag_mean", "mag_var", "mag_skew", "mag_kurt",
    "phase_mean", "phase_var", "phase_skew", "phase_kurt",
    "mfcc_mean", "mfcc_var",
    "delta_mean", "delta_var",
    "delta2_mean", "delta2_var",
)
BICO_COLUMNS = tuple(range(8))

LABELS = ("Human", "NaturalReader", "SpikAI", "Replica")
BINARY_LABELS = ("Human", "Synthetic")

_VAR_FLOOR = 1e-24


@dataclass(frozen=True)
class Moments:
    mean: float
    variance: float
    skewness: float
    kurtosis: float  # non-excess: a normal law gives 3

    def as_tuple(self):
        return (self.mean, self.variance, self.skewness, self.kurtosis)


@dataclass(frozen=True)
class FeatureVector:
    values: tuple
    label: str

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if len(vals) != len(FEATURE_NAMES):
            raise ValueError(f"expected {len(FEATURE_NAMES)} values, got {len(vals)}")
        if not all(np.isfinite(vals)):
            raise ValueError("feature values must be finite")
        object.__setattr__(self, "values", vals)

    def as_array(self) -> np.ndarray:
        return np.array(self.values)


def moments(values) -> Moments:
    """Population moments; skewness and kurtosis are 0 when variance < 1e-24."""
    x = np.asarray(values, dtype=np.float64).ravel()
    if x.size == 0:
        raise EmptyInput("moments of an empty sequence")
    mu = x.mean()
    d = x - mu
    var = np.mean(d * d)
    if var < _VAR_FLOOR:
        return Moments(float(mu), float(var), 0.0, 0.0)
    z = d / np.sqrt(var)
    z2 = z * z
    return Moments(float(mu), float(var), float(np.mean(z2 * z)), float(np.mean(z2 * z2)))


def _classic_grid(clip: AudioClip, config: BispectralConfig) -> bispectrum.BicoherenceGrid:
    segments = bispectrum.segment_clip(clip, config)
    if not np.any(segments[:, : config.segment_fft_size]):
        raise DegenerateSignal("clip carries no energy in any analysed segment")
    mag = bispectrum.bicoherence(segments, config)
    spectra = bispectrum.segment_spectra(segments, config)
    biphase = np.angle(bispectrum.segment_bispectrum(spectra).sum(axis=0))
    mask = bispectrum.valid_mask(config.segment_fft_size)
    phase = np.where(mask, (biphase + np.pi) / (2 * np.pi), 0.0)
    return bispectrum.BicoherenceGrid(mag, phase, mask, normalized=True)


def extract_features(
    clip: AudioClip,
    bisp_config: BispectralConfig = BispectralConfig(),
    cep_config: CepstralConfig = CepstralConfig(),
    label: str = "",
    estimator: str = "normalized",
) -> FeatureVector:
    """Compute the feature vector of a mono clip.

    ``estimator="normalized"`` (default) takes moments of the min-max
    normalized averaged magnitude and the mapped averaged biphase;
    ``"classic"`` uses the classic bicoherence and the phase of the
    averaged complex bispectrum instead.
    """
    if estimator == "normalized":
        grid = bispectrum.bispectral_grid(clip, bisp_config)
    elif estimator == "classic":
        grid = _classic_grid(clip, bisp_config)
    else:
        raise ValueError(f"unknown estimator {estimator!r}")
    mag, phase = grid.valid_values()

    m = cepstral.mfcc(clip, cep_config)
    d1 = cepstral.delta(m)
    d2 = cepstral.delta(d1)
    values = moments(mag).as_tuple() + moments(phase).as_tuple()
    for mat in (m, d1, d2):
        c = mat.coeffs
        values += (float(c.mean()), float(c.var()))
    return FeatureVector(values, label)


def write_feature_csv(rows, path=None) -> str:
    """Serialize FeatureVectors; floats use ``repr`` so reading back is exact."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FEATURE_NAMES + ("label",))
    for fv in rows:
        writer.writerow([repr(v) for v in fv.values] + [fv.label])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    return text


def read_feature_csv(path):
    """Return ``(X, labels)`` from a feature CSV."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != FEATURE_NAMES + ("label",):
            raise FormatError(f"{path}: unexpected header {header}")
        rows = [r for r in reader if r]
    try:
        X = np.array([[float(v) for v in r[:-1]] for r in rows], dtype=np.float64)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    X = X.reshape(len(rows), len(FEATURE_NAMES))
    return X, [r[-1] for r in rows]
