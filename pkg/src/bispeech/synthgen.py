"""
Deterministic audio fixtures for testing the pipeline without a speech corpus.

The key fixture is a quadratically phase-coupled tone triple

    cos(2 pi f1 t + p1) + cos(2 pi f2 t + p2) + cos(2 pi (f1+f2) t + p1 + p2 + psi)

where, block by block, psi is held at a fixed biphase with probability
``coupling`` and drawn uniformly from (-pi, pi] otherwise.  Coupled blocks
give near-unit bicoherence at (f1, f2); uncoupled blocks destroy it while
leaving the power spectrum unchanged.

:class:`HarmonicStack` extends the idea to every harmonic pair (i, j) with
i + j <= n_harmonics: harmonic h carries phase h*p + c_h, with c_h equal to
the biphase in coupled blocks and independently random otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio_io import AudioClip, write_wav
from .dataset import Manifest, write_manifest
from .errors import IoFailure, NyquistViolation

__all__ = [
    "Tone",
    "CoupledTriple",
    "HarmonicStack",
    "WhiteNoise",
    "Silence",
    "FixtureSpec",
    "generate",
    "make_corpus",
    "CorpusRecipe",
    "PEAK",
]

PEAK = 0.9


@dataclass(frozen=True)
class Tone:
    freq: float


@dataclass(frozen=True)
class CoupledTriple:
    f1: float
    f2: float
    coupling: float = 1.0
    biphase: float = 0.0  # psi used in coupled blocks

    def __post_init__(self):
        if not 0.0 <= self.coupling <= 1.0:
            raise ValueError("coupling must lie in [0, 1]")


@dataclass(frozen=True)
class HarmonicStack:
    f0: float
    n_harmonics: int = 4
    coupling: float = 1.0
    biphase: float = 0.0
    rolloff: float = 1.0  # harmonic h has amplitude h**-rolloff

    def __post_init__(self):
        if not 0.0 <= self.coupling <= 1.0:
            raise ValueError("coupling must lie in [0, 1]")
        if self.n_harmonics < 2:
            raise ValueError("n_harmonics must be >= 2")


@dataclass(frozen=True)
class WhiteNoise:
    pass


@dataclass(frozen=True)
class Silence:
    pass


@dataclass(frozen=True)
class FixtureSpec:
    kind: object
    duration_s: float = 1.0
    sample_rate: int = 16000
    seed: int = 0
    snr_db: float | None = None
    block_size: int | None = None  # coupling block; default n_samples // 100
    am_depth: float = 0.0  # raised-cosine amplitude envelope, 0 disables
    am_rate_hz: float = 4.0

    def __post_init__(self):
        if self.duration_s < 0.5:
            raise ValueError("duration_s must be at least 0.5 s")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if not 0.0 <= self.am_depth <= 1.0:
            raise ValueError("am_depth must lie in [0, 1]")

    @property
    def n_samples(self) -> int:
        return int(round(self.duration_s * self.sample_rate))


def _check_nyquist(freqs, sample_rate):
    nyq = sample_rate / 2.0
    for f in freqs:
        if not 0 < f < nyq:
            raise NyquistViolation(f"{f} Hz is outside (0, {nyq}) Hz")


def generate(spec: FixtureSpec) -> AudioClip:
    rng = np.random.default_rng(spec.seed)
    n, sr = spec.n_samples, spec.sample_rate
    t = np.arange(n) / sr
    kind = spec.kind

    if isinstance(kind, Silence):
        return AudioClip(np.zeros(n), sr, "synth:silence")
    if isinstance(kind, Tone):
        _check_nyquist([kind.freq], sr)
        x = np.cos(2 * np.pi * kind.freq * t)
    elif isinstance(kind, CoupledTriple):
        _check_nyquist([kind.f1, kind.f2, kind.f1 + kind.f2], sr)
        p1, p2 = rng.uniform(-np.pi, np.pi, size=2)
        block = spec.block_size or max(1, n // 100)
        n_blocks = -(-n // block)
        coupled = rng.random(n_blocks) < kind.coupling
        random_psi = rng.uniform(-np.pi, np.pi, size=n_blocks)
        psi = np.where(coupled, kind.biphase, random_psi)
        psi_t = np.repeat(psi, block)[:n]
        x = (
            np.cos(2 * np.pi * kind.f1 * t + p1)
            + np.cos(2 * np.pi * kind.f2 * t + p2)
            + np.cos(2 * np.pi * (kind.f1 + kind.f2) * t + p1 + p2 + psi_t)
        )
    elif isinstance(kind, HarmonicStack):
        _check_nyquist([kind.f0 * kind.n_harmonics], sr)
        p = rng.uniform(-np.pi, np.pi)
        block = spec.block_size or max(1, n // 100)
        n_blocks = -(-n // block)
        coupled = rng.random(n_blocks) < kind.coupling
        x = np.zeros(n)
        for h in range(1, kind.n_harmonics + 1):
            c = np.where(coupled, kind.biphase, rng.uniform(-np.pi, np.pi, size=n_blocks))
            phase = h * p + np.repeat(c, block)[:n]
            x += h ** -kind.rolloff * np.cos(2 * np.pi * h * kind.f0 * t + phase)
    elif isinstance(kind, WhiteNoise):
        x = rng.standard_normal(n)
    else:
        raise TypeError(f"unknown fixture kind {kind!r}")

    if spec.am_depth > 0:
        offset = rng.uniform(0.0, 2 * np.pi)
        x = x * (1.0 - spec.am_depth * 0.5 * (1.0 - np.cos(2 * np.pi * spec.am_rate_hz * t + offset)))

    if spec.snr_db is not None and not isinstance(kind, WhiteNoise):
        noise_power = np.mean(x ** 2) / 10.0 ** (spec.snr_db / 10.0)
        x = x + np.sqrt(noise_power) * rng.standard_normal(n)
    peak = np.max(np.abs(x))
    if peak > 0:
        x = PEAK * x / peak
    return AudioClip(x, sr, f"synth:{type(kind).__name__}")


@dataclass(frozen=True)
class CorpusRecipe:
    """Per-file randomization ranges used by :func:`make_corpus`.

    Both classes are harmonic stacks with f0 on the bin grid of a
    ``fft_size``-point segment FFT, plus white noise.  ``Synthetic`` clips
    are fully coupled at a random biphase of magnitude ``biphase_abs`` and
    have a flat amplitude; ``Human`` clips are uncoupled and carry a
    syllable-rate amplitude envelope.
    """

    duration_s: float = 2.0
    sample_rate: int = 16000
    fft_size: int = 64
    f0_bins: tuple = (2, 3)
    n_harmonics: int = 4
    snr_db: tuple = (5.0, 20.0)
    biphase_abs: tuple = (np.pi / 4, 3 * np.pi / 4)
    am_depth: tuple = (0.5, 0.9)
    am_rate_hz: tuple = (3.0, 6.0)
    segments: int = 100
    labels: tuple = ("Human", "Synthetic")


def _corpus_spec(recipe: CorpusRecipe, coupled: bool, seed: int, index: int) -> FixtureSpec:
    rng = np.random.default_rng([seed, index])
    f0 = recipe.sample_rate / recipe.fft_size * int(rng.integers(recipe.f0_bins[0], recipe.f0_bins[1] + 1))
    biphase = float(rng.choice([-1.0, 1.0]) * rng.uniform(*recipe.biphase_abs))
    snr = float(rng.uniform(*recipe.snr_db))
    am_depth = 0.0 if coupled else float(rng.uniform(*recipe.am_depth))
    am_rate = float(rng.uniform(*recipe.am_rate_hz))
    n = int(round(recipe.duration_s * recipe.sample_rate))
    kind = HarmonicStack(f0, recipe.n_harmonics, 1.0 if coupled else 0.0, biphase)
    return FixtureSpec(
        kind,
        recipe.duration_s,
        recipe.sample_rate,
        seed=int(rng.integers(0, 2 ** 63 - 1)),
        snr_db=snr,
        block_size=n // recipe.segments,
        am_depth=am_depth,
        am_rate_hz=am_rate,
    )


def make_corpus(out_dir, n_per_class: int, seed: int, recipe: CorpusRecipe = CorpusRecipe()) -> Manifest:
    """Write ``2 * n_per_class`` WAV files and ``manifest.csv`` into ``out_dir``.

    See :class:`CorpusRecipe` for how the two classes differ.  File ``i``
    draws its parameters from a generator seeded with ``(seed, i)``.
    """
    if n_per_class < 5:
        raise ValueError("n_per_class must be at least 5")
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot create {out}: {exc}") from exc
    human, synthetic = recipe.labels
    entries = []
    for i in range(2 * n_per_class):
        coupled = i >= n_per_class
        label = synthetic if coupled else human
        name = f"{label.lower()}_{i % n_per_class:03d}.wav"
        clip = generate(_corpus_spec(recipe, coupled, seed, i))
        try:
            write_wav(out / name, clip)
        except OSError as exc:
            raise IoFailure(f"cannot write {out / name}: {exc}") from exc
        entries.append((str(out / name), label))
    manifest = Manifest(tuple(entries))
    write_manifest(manifest, out / "manifest.csv", relative_to=out)
    return manifest
