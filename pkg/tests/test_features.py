import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bispeech import bispectrum, cepstral, features, synthgen
from bispeech.audio_io import AudioClip
from bispeech.errors import DegenerateSignal, EmptyInput, FormatError
from bispeech.features import FeatureVector, moments
from oracles import brute_moments


@pytest.fixture(scope="module")
def clip():
    kind = synthgen.CoupledTriple(1000.0, 1750.0, coupling=0.7, biphase=0.4)
    return synthgen.generate(synthgen.FixtureSpec(kind, 1.5, 16000, seed=11, snr_db=15.0))


def test_moments_examples():
    assert moments([1, 1, 1]).as_tuple() == (1.0, 0.0, 0.0, 0.0)
    assert moments([-1, 1]).as_tuple() == (0.0, 1.0, 0.0, 1.0)
    with pytest.raises(EmptyInput):
        moments([])


def test_moments_normal_law():
    m = moments(np.random.default_rng(2024).standard_normal(100_000))
    assert abs(m.skewness) <= 0.05
    assert abs(m.kurtosis - 3.0) <= 0.1


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=200))
def test_moments_match_brute_force(values):
    got = moments(values).as_tuple()
    ref = brute_moments(values)
    scale = max(1.0, max(abs(v) for v in values))
    np.testing.assert_allclose(got[:2], ref[:2], rtol=1e-12, atol=1e-12 * scale ** 2)
    if ref[1] > 1e-6 * scale ** 2:
        np.testing.assert_allclose(got[2:], ref[2:], rtol=1e-9, atol=1e-9)
        assert got[3] >= 1.0 - 1e-9 and got[3] >= got[2] ** 2 + 1 - 1e-6


def test_feature_vector_validation():
    with pytest.raises(ValueError):
        FeatureVector((1.0,) * 13, "Human")
    with pytest.raises(ValueError):
        FeatureVector((1.0,) * 13 + (float("nan"),), "Human")


def test_silence_is_degenerate():
    with pytest.raises(DegenerateSignal):
        features.extract_features(AudioClip(np.zeros(16000), 16000))


def test_extract_layout(clip):
    fv = features.extract_features(clip, label="Human")
    assert len(fv.values) == 14 and fv.label == "Human"
    assert all(np.isfinite(fv.values))
    assert 0 <= fv.values[0] <= 1 and 0 <= fv.values[4] <= 1
    m = cepstral.mfcc(clip)
    d1 = cepstral.delta(m)
    d2 = cepstral.delta2(m)
    expect = []
    for mat in (m, d1, d2):
        expect += [mat.coeffs.mean(), mat.coeffs.var()]
    np.testing.assert_allclose(fv.values[8:], expect, rtol=1e-12)


def test_bispectral_entries_from_text_dumps(clip, tmp_path):
    grid = bispectrum.bispectral_grid(clip)
    bispectrum.dump_grid_text(grid.magnitude, tmp_path / "mag.txt")
    bispectrum.dump_grid_text(grid.phase, tmp_path / "phase.txt")
    mask = bispectrum.valid_mask(64)
    fv = features.extract_features(clip)
    mag = np.loadtxt(tmp_path / "mag.txt")[mask]
    phase = np.loadtxt(tmp_path / "phase.txt")[mask]
    np.testing.assert_allclose(fv.values[:4], brute_moments(mag), rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(fv.values[4:8], brute_moments(phase), rtol=1e-12, atol=1e-15)


def test_deterministic(clip):
    twin = AudioClip(np.array(clip.samples), clip.sample_rate)
    assert features.extract_features(clip).values == features.extract_features(twin).values


def test_bispectral_entries_scale_free(clip):
    a = features.extract_features(clip).values[:8]
    b = features.extract_features(AudioClip(clip.samples * 0.37, clip.sample_rate)).values[:8]
    np.testing.assert_allclose(a, b, rtol=1e-6, atol=1e-6)


def test_classic_estimator(clip):
    fv = features.extract_features(clip, estimator="classic")
    assert 0 <= fv.values[0] <= 1 and 0 <= fv.values[4] <= 1
    assert fv.values[8:] == features.extract_features(clip).values[8:]
    with pytest.raises(ValueError):
        features.extract_features(clip, estimator="other")


def test_csv_round_trip(tmp_path, rng):
    rows = [FeatureVector(tuple(rng.standard_normal(14) * 10.0 ** rng.integers(-9, 9)), lab)
            for lab in ("Human", "Synthetic", "Replica")]
    text = features.write_feature_csv(rows, tmp_path / "f.csv")
    assert text.splitlines()[0] == ",".join(features.FEATURE_NAMES) + ",label"
    X, labels = features.read_feature_csv(tmp_path / "f.csv")
    assert labels == ["Human", "Synthetic", "Replica"]
    np.testing.assert_array_equal(X, np.array([r.values for r in rows]))
    again = features.write_feature_csv([FeatureVector(tuple(x), l) for x, l in zip(X, labels)])
    assert again == text


def test_csv_errors(tmp_path):
    (tmp_path / "a.csv").write_text("x,y\n1,2\n")
    with pytest.raises(FormatError):
        features.read_feature_csv(tmp_path / "a.csv")
    bad = ",".join(features.FEATURE_NAMES) + ",label\n" + ",".join(["zz"] * 14) + ",Human\n"
    (tmp_path / "b.csv").write_text(bad)
    with pytest.raises(FormatError):
        features.read_feature_csv(tmp_path / "b.csv")
