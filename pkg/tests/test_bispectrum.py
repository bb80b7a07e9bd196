import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bispeech import bispectrum as bs
from bispeech import dsp, synthgen
from bispeech.audio_io import AudioClip
from bispeech.errors import ClipTooShort, DegenerateSignal, TooFewSegments
from oracles import averaged_loop, naive_dft, triple_product_loop

CFG = bs.BispectralConfig()


def _coupled_triple(sr=16000, n=32000, third_phase=None):
    t = np.arange(n) / sr
    f1, f2 = 1000.0, 1750.0  # bins 4 and 7 at 250 Hz per bin
    third = 2 * np.pi * (f1 + f2) * t
    if third_phase is not None:
        third = third + np.repeat(third_phase, n // len(third_phase))
    x = np.cos(2 * np.pi * f1 * t) + np.cos(2 * np.pi * f2 * t) + np.cos(third)
    return AudioClip(x / 3.0, sr)


def test_config_validation():
    with pytest.raises(ValueError):
        bs.BispectralConfig(target_segments=1)
    with pytest.raises(ValueError):
        bs.BispectralConfig(segment_fft_size=48)
    with pytest.raises(ValueError):
        bs.BispectralConfig(segment_fft_size=4)


def test_segment_clip_exact_division():
    segs = bs.segment_clip(AudioClip(np.arange(40000) / 40000, 8000), CFG)
    assert segs.shape == (100, 400)
    assert segs[1, 0] == 400 / 40000


def test_segment_clip_drops_remainder():
    x = np.arange(40050) / 40050
    segs = bs.segment_clip(AudioClip(x, 8000), CFG)
    assert segs.shape == (100, 400)
    np.testing.assert_array_equal(segs.ravel(), x[:40000])


def test_segment_clip_too_short():
    with pytest.raises(ClipTooShort):
        bs.segment_clip(AudioClip(np.ones(60) * 0.1, 8000), CFG)


def test_segment_clip_short_clip_falls_back_to_fft_length():
    segs = bs.segment_clip(AudioClip(np.zeros(1000), 8000), CFG)
    assert segs.shape == (15, 64)
    segs = bs.segment_clip(AudioClip(np.zeros(130), 8000), CFG)
    assert segs.shape == (2, 64)


def test_segment_spectra_truncate_then_window(rng):
    seg = rng.standard_normal((3, 400))
    spec = bs.segment_spectra(seg, CFG)
    w = dsp.window("hann", 64)
    np.testing.assert_allclose(spec[1], naive_dft(seg[1, :64] * w), atol=1e-10)


def test_segment_bispectrum_examples():
    assert not np.any(bs.segment_bispectrum(np.zeros(16, complex)))
    y = np.zeros(8, complex)
    y[1], y[2], y[3] = 2, 3, 4
    b = bs.segment_bispectrum(y)
    assert b[1, 2] == 24 and b[2, 1] == 24
    assert b.shape == (4, 4)


def test_segment_bispectrum_matches_loop(rng):
    y = naive_dft(rng.standard_normal(32))
    np.testing.assert_allclose(bs.segment_bispectrum(y), triple_product_loop(y), atol=1e-9)


def test_averaged_identical_segments(rng):
    seg = rng.standard_normal(64)
    y = np.abs(bs.segment_spectra(seg[None], CFG)[0])
    k = np.arange(32)
    one = y[k][:, None] * y[k][None, :] * y[(k[:, None] + k[None, :]) % 64]
    grid = bs.averaged_bispectrum(np.tile(seg, (7, 1)), CFG)
    # the mean of equal values, up to the last-ulp rounding of sum / count
    np.testing.assert_allclose(grid.magnitude, np.where(grid.valid_mask, one, 0), rtol=4e-16, atol=0)


def test_averaged_phase_cancels():
    # two segments with biphase +0.7 and -0.7 at (1, 2): phases only at bins 1, 2, 3
    n = 64
    t = np.arange(n)
    cfg = bs.BispectralConfig(segment_fft_size=n, window="rectangular")
    segs = [
        np.cos(2 * np.pi * t / n) + np.cos(2 * np.pi * 2 * t / n) + np.cos(2 * np.pi * 3 * t / n - s * 0.7)
        for s in (1, -1)
    ]
    grid = bs.averaged_bispectrum(np.array(segs), cfg)
    assert abs(grid.phase[1, 2]) < 1e-12


def test_averaged_matches_loops(rng):
    segs = rng.standard_normal((10, 64))
    w = dsp.window("hann", 64)
    spectra = np.array([naive_dft(s * w) for s in segs])
    mag, phase = averaged_loop(spectra)
    grid = bs.averaged_bispectrum(segs, CFG)
    np.testing.assert_allclose(grid.magnitude, mag, rtol=1e-9, atol=1e-9)
    np.testing.assert_allclose(grid.phase, phase, atol=1e-9)


def test_too_few_segments(rng):
    with pytest.raises(TooFewSegments):
        bs.averaged_bispectrum(rng.standard_normal((1, 64)), CFG)
    with pytest.raises(TooFewSegments):
        bs.bicoherence(rng.standard_normal((1, 64)), CFG)


def test_wrap_phase_range():
    x = np.array([-3 * np.pi, -np.pi, -np.pi + 1e-9, 0.0, np.pi, 3 * np.pi, 7.0, np.pi + 4e-16])
    w = bs.wrap_phase(x)
    assert np.all(w > -np.pi) and np.all(w <= np.pi)
    np.testing.assert_allclose(np.exp(1j * w), np.exp(1j * x), atol=1e-12)
    assert w[1] == np.pi and w[-1] == np.pi
    assert w[2] == pytest.approx(-np.pi + 1e-9)


def test_coupled_triple_high_bicoherence():
    clip = _coupled_triple()
    b = bs.bicoherence(bs.segment_clip(clip, CFG), CFG)
    assert b[4, 7] >= 0.9


def test_randomized_third_phase_low_bicoherence():
    phases = np.random.default_rng(3).uniform(-np.pi, np.pi, 100)
    clip = _coupled_triple(third_phase=phases)
    b = bs.bicoherence(bs.segment_clip(clip, CFG), CFG)
    assert b[4, 7] <= 0.5


def test_coupled_beats_randomized_in_mean_bicoherence():
    phases = np.random.default_rng(3).uniform(-np.pi, np.pi, 100)
    coupled = bs.bicoherence(bs.segment_clip(_coupled_triple(), CFG), CFG)
    scrambled = bs.bicoherence(bs.segment_clip(_coupled_triple(third_phase=phases), CFG), CFG)
    mask = bs.valid_mask(64)
    assert coupled[mask].mean() > scrambled[mask].mean()


def test_zero_numerator_gives_zero():
    # a constant segment transforms to DC only (off-DC bins are exact zeros),
    # so every triple product except (0, 0) vanishes
    cfg = bs.BispectralConfig(segment_fft_size=64, window="rectangular")
    segs = np.outer([0.5, 0.25, 0.75], np.ones(64))
    assert not np.any(bs.segment_spectra(segs, cfg)[:, 1:])
    b = bs.bicoherence(segs, cfg)
    assert b[0, 0] > 0.9
    b[0, 0] = 0.0
    assert not np.any(b)
    assert not np.any(bs.bicoherence(np.zeros((3, 64)), cfg))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(128, 6000))
def test_classic_bicoherence_bounded(seed, n):
    r = np.random.default_rng(seed)
    x = r.standard_normal(n) * r.uniform(0.01, 1) + np.sin(np.arange(n) * r.uniform(0, 3))
    segs = bs.segment_clip(AudioClip(x / np.abs(x).max(), 8000), CFG)
    b = bs.bicoherence(segs, CFG)
    assert b.min() >= 0.0 and b.max() <= 1.0 + 1e-9


def test_normalize_examples():
    mask = bs.valid_mask(4)
    assert mask.sum() == 3
    raw = bs.BicoherenceGrid(np.array([[2.0, 4.0], [6.0, 0.0]]),
                             np.array([[np.pi, -np.pi + 1e-3], [0.0, 0.0]]), mask)
    g = bs.normalize_grid(raw)
    np.testing.assert_allclose(g.magnitude, [[0.0, 0.5], [1.0, 0.0]])
    assert g.phase[0, 0] == 1.0
    assert g.phase[0, 1] == pytest.approx(1e-3 / (2 * np.pi), abs=1e-15)
    assert g.phase[1, 0] == 0.5


def test_normalize_constant_and_idempotent(rng):
    mask = bs.valid_mask(16)
    flat = bs.BicoherenceGrid(np.where(mask, 3.0, 0), np.zeros((8, 8)), mask)
    assert not np.any(bs.normalize_grid(flat).magnitude)
    g = bs.bispectral_grid(AudioClip(rng.uniform(-1, 1, 8000), 8000), CFG)
    mask = g.valid_mask
    again = bs.normalize_grid(g)
    np.testing.assert_allclose(again.magnitude, g.magnitude, atol=1e-12)
    np.testing.assert_allclose(again.phase, g.phase, atol=1e-12)
    # min-max of an already [0, 1]-spanning grid is the identity too
    v = g.magnitude[mask]
    np.testing.assert_allclose((v - v.min()) / (v.max() - v.min()), v, atol=1e-12)


def test_normalized_grid_ranges(rng):
    g = bs.bispectral_grid(AudioClip(rng.uniform(-1, 1, 12000), 8000), CFG)
    for m in (g.magnitude, g.phase):
        assert m[g.valid_mask].min() >= 0 and m[g.valid_mask].max() <= 1
        assert not np.any(m[~g.valid_mask])


def test_symmetry(rng):
    clip = AudioClip(rng.uniform(-1, 1, 9000), 8000)
    raw = bs.bispectral_grid(clip, CFG, normalized=False)
    norm = bs.normalize_grid(raw)
    for m in (raw.magnitude, raw.phase, norm.magnitude, norm.phase,
              bs.bicoherence(bs.segment_clip(clip, CFG), CFG)):
        np.testing.assert_array_equal(m, m.T)


def test_circular_shift_invariance(rng):
    cfg = bs.BispectralConfig(segment_fft_size=64, window="rectangular")
    segs = rng.standard_normal((12, 64))
    shifted = np.array([np.roll(s, int(k)) for s, k in zip(segs, rng.integers(1, 63, 12))])
    a = bs.averaged_bispectrum(segs, cfg).magnitude
    b = bs.averaged_bispectrum(shifted, cfg).magnitude
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-6 * a.max())


def test_amplitude_scaling(rng):
    x = rng.uniform(-0.5, 0.5, 10000)
    c = 1.7
    base, scaled = AudioClip(x, 8000), AudioClip(c * x, 8000)
    r0 = bs.bispectral_grid(base, CFG, normalized=False)
    r1 = bs.bispectral_grid(scaled, CFG, normalized=False)
    np.testing.assert_allclose(r1.magnitude, c ** 3 * r0.magnitude, rtol=1e-9)
    np.testing.assert_allclose(r1.phase, r0.phase, atol=1e-9)
    n0, n1 = bs.normalize_grid(r0), bs.normalize_grid(r1)
    np.testing.assert_allclose(n1.magnitude, n0.magnitude, atol=1e-9)
    b0 = bs.bicoherence(bs.segment_clip(base, CFG), CFG)
    b1 = bs.bicoherence(bs.segment_clip(scaled, CFG), CFG)
    np.testing.assert_allclose(b1, b0, atol=1e-9)


def test_segment_order_does_not_matter(rng):
    segs = rng.standard_normal((100, 64))
    perm = rng.permutation(100)
    a, b = bs.averaged_bispectrum(segs, CFG), bs.averaged_bispectrum(segs[perm], CFG)
    np.testing.assert_allclose(a.magnitude, b.magnitude, rtol=1e-12, atol=0)
    np.testing.assert_allclose(a.phase, b.phase, atol=1e-12)


def test_silence_is_degenerate():
    with pytest.raises(DegenerateSignal):
        bs.bispectral_grid(AudioClip(np.zeros(8000), 8000), CFG)


def test_synth_coupling_separation():
    def at_bin(coupling):
        vals = []
        for seed in range(3):
            spec = synthgen.FixtureSpec(synthgen.CoupledTriple(500.0, 700.0, coupling), 2.0, 16000, seed=seed)
            clip = synthgen.generate(spec)
            vals.append(bs.bicoherence(bs.segment_clip(clip, CFG), CFG)[2, 3])
        return np.mean(vals)

    assert at_bin(1.0) - at_bin(0.0) >= 0.3


def test_dump_grid_text(tmp_path, rng):
    m = rng.standard_normal((4, 4))
    text = bs.dump_grid_text(m, tmp_path / "g.txt")
    assert len(text.splitlines()) == 4
    back = np.loadtxt(tmp_path / "g.txt")
    np.testing.assert_array_equal(back, m)
