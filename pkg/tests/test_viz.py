import struct
import zlib

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bispeech import bispectrum, viz
from bispeech.errors import EmptyMatrix
from conftest import DATA
from data.make_goldens import coupled_clip


def _read_ppm(raw):
    magic, dims, maxval, pixels = raw.split(b"\n", 3)
    w, h = map(int, dims.split())
    assert magic == b"P6" and maxval == b"255"
    return np.frombuffer(pixels, dtype=np.uint8).reshape(h, w, 3)


def _read_png(raw):
    assert raw[:8] == b"\x89PNG\r\n\x1a\n"
    pos, chunks = 8, {}
    while pos < len(raw):
        (n,) = struct.unpack(">I", raw[pos:pos + 4])
        tag, body = raw[pos + 4:pos + 8], raw[pos + 8:pos + 8 + n]
        assert struct.unpack(">I", raw[pos + 8 + n:pos + 12 + n])[0] == zlib.crc32(tag + body)
        chunks[tag] = chunks.get(tag, b"") + body
        pos += 12 + n
    w, h = struct.unpack(">II", chunks[b"IHDR"][:8])
    rows = zlib.decompress(chunks[b"IDAT"])
    data = np.frombuffer(rows, dtype=np.uint8).reshape(h, 1 + 3 * w)
    assert (data[:, 0] == 0).all()
    return data[:, 1:].reshape(h, w, 3)


def test_grayscale_endpoints(tmp_path):
    assert viz.render_heatmap(viz.Heatmap([[0.0, 1.0]], colormap="grayscale"), tmp_path / "a.ppm") == (2, 1)
    raw = (tmp_path / "a.ppm").read_bytes()
    assert raw == b"P6\n2 1\n255\n" + bytes([0, 0, 0, 255, 255, 255])


def test_constant_matrix_is_first_entry():
    for name, table in viz.COLORMAPS.items():
        rgb = viz.to_rgb(viz.Heatmap(np.full((3, 5), -2.0), (-2.0, 4.0), name))
        assert (rgb == table[0]).all()


def test_row_zero_at_bottom():
    rgb = viz.to_rgb(viz.Heatmap([[0.0], [1.0]], colormap="grayscale"))
    assert tuple(rgb[0, 0]) == (255, 255, 255) and tuple(rgb[1, 0]) == (0, 0, 0)


def test_colormap_tables():
    for table in (viz.GRAYSCALE, viz.VIRIDIS):
        assert table.shape == (256, 3) and table.dtype == np.uint8
    assert tuple(viz.VIRIDIS[0]) == (68, 1, 84) and tuple(viz.VIRIDIS[255]) == (253, 231, 37)


@given(st.floats(-2, 2), st.floats(-2, 2))
def test_grayscale_monotone(a, b):
    rgb = viz.to_rgb(viz.Heatmap([[min(a, b), max(a, b)]], colormap="grayscale"))
    lum = rgb[0, :, :].astype(int).sum(axis=1)
    assert lum[0] <= lum[1]


@pytest.mark.parametrize("scale", [1, 2, 5])
def test_dimensions(scale, tmp_path):
    m = np.random.default_rng(0).random((7, 11))
    size = viz.render_heatmap(viz.Heatmap(m), tmp_path / "m.ppm", scale)
    assert size == (11 * scale, 7 * scale)
    img = _read_ppm((tmp_path / "m.ppm").read_bytes())
    assert img.shape == (7 * scale, 11 * scale, 3)
    np.testing.assert_array_equal(img[::scale, ::scale], viz.to_rgb(viz.Heatmap(m)))


def test_errors(tmp_path):
    with pytest.raises(EmptyMatrix):
        viz.render_heatmap(viz.Heatmap(np.zeros((0, 3))), tmp_path / "e.ppm")
    with pytest.raises(ValueError):
        viz.to_rgb(viz.Heatmap([[1.0]], (1.0, 1.0)))
    with pytest.raises(ValueError):
        viz.to_rgb(viz.Heatmap([[1.0]]), scale=0)


def test_png_matches_ppm_pixels(tmp_path):
    m = np.random.default_rng(1).random((9, 4))
    viz.render_heatmap(viz.Heatmap(m), tmp_path / "m.png", 3)
    viz.render_heatmap(viz.Heatmap(m), tmp_path / "m.ppm", 3)
    np.testing.assert_array_equal(_read_png((tmp_path / "m.png").read_bytes()),
                                  _read_ppm((tmp_path / "m.ppm").read_bytes()))


def test_deterministic(tmp_path):
    m = np.random.default_rng(2).random((16, 16))
    viz.render_heatmap(viz.Heatmap(m), tmp_path / "a.ppm")
    viz.render_heatmap(viz.Heatmap(m.copy()), tmp_path / "b.ppm")
    assert (tmp_path / "a.ppm").read_bytes() == (tmp_path / "b.ppm").read_bytes()


def test_golden_bicoherence(tmp_path):
    grid = bispectrum.bispectral_grid(coupled_clip(), bispectrum.BispectralConfig(segment_fft_size=128))
    assert grid.magnitude.shape == (64, 64)
    viz.render_heatmap(viz.Heatmap(grid.magnitude), tmp_path / "g.ppm")
    assert (tmp_path / "g.ppm").read_bytes() == (DATA / "bicoherence_coupled_64x64.ppm").read_bytes()
