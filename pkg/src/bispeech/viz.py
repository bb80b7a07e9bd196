"""
Heatmap rendering to binary PPM (P6) or PNG.

Value v maps to colormap entry round(255 * clamp((v - lo) / (hi - lo), 0, 1)).
Matrix row 0 is drawn at the bottom of the image so frequency axes grow
upward; each cell becomes a ``scale`` x ``scale`` pixel block.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyMatrix, IoFailure

__all__ = ["GRAYSCALE", "VIRIDIS", "COLORMAPS", "Heatmap", "to_rgb", "render_heatmap", "encode_ppm", "encode_png"]

# perceptually ordered anchors, dark blue -> teal -> green -> yellow
_VIRIDIS_ANCHORS = np.array([
    (68, 1, 84), (72, 40, 120), (62, 74, 137), (49, 104, 142),
    (38, 130, 142), (31, 158, 137), (53, 183, 121), (110, 206, 88),
    (181, 222, 43), (253, 231, 37),
], dtype=np.float64)

GRAYSCALE = np.repeat(np.arange(256, dtype=np.uint8)[:, None], 3, axis=1)
_t = np.linspace(0.0, 1.0, len(_VIRIDIS_ANCHORS))
VIRIDIS = np.stack(
    [np.interp(np.linspace(0.0, 1.0, 256), _t, _VIRIDIS_ANCHORS[:, c]) for c in range(3)], axis=1
).round().astype(np.uint8)
GRAYSCALE.setflags(write=False)
VIRIDIS.setflags(write=False)
COLORMAPS = {"grayscale": GRAYSCALE, "viridis": VIRIDIS}


@dataclass(frozen=True)
class Heatmap:
    data: np.ndarray
    value_range: tuple = (0.0, 1.0)
    colormap: str = "viridis"


def to_rgb(heatmap: Heatmap, scale: int = 1) -> np.ndarray:
    """RGB pixel array of shape (rows*scale, cols*scale, 3), row 0 at the bottom."""
    data = np.atleast_2d(np.asarray(heatmap.data, dtype=np.float64))
    if data.size == 0:
        raise EmptyMatrix("cannot render an empty matrix")
    lo, hi = heatmap.value_range
    if not hi > lo:
        raise ValueError(f"value range needs hi > lo, got {heatmap.value_range}")
    if scale < 1:
        raise ValueError("scale must be a positive integer")
    idx = np.round(255.0 * np.clip((np.nan_to_num(data) - lo) / (hi - lo), 0.0, 1.0)).astype(int)
    rgb = COLORMAPS[heatmap.colormap][idx[::-1]]
    return np.repeat(np.repeat(rgb, scale, axis=0), scale, axis=1)


def encode_ppm(rgb: np.ndarray) -> bytes:
    h, w, _ = rgb.shape
    return f"P6\n{w} {h}\n255\n".encode("ascii") + np.ascontiguousarray(rgb, dtype=np.uint8).tobytes()


def _png_chunk(tag: bytes, body: bytes) -> bytes:
    return struct.pack(">I", len(body)) + tag + body + struct.pack(">I", zlib.crc32(tag + body))


def encode_png(rgb: np.ndarray) -> bytes:
    h, w, _ = rgb.shape
    raw = b"".join(b"\x00" + row.tobytes() for row in np.ascontiguousarray(rgb, dtype=np.uint8))
    return (
        b"\x89PNG\r\n\x1a\n"
        + _png_chunk(b"IHDR", struct.pack(">IIBBBBB", w, h, 8, 2, 0, 0, 0))
        + _png_chunk(b"IDAT", zlib.compress(raw, 9))
        + _png_chunk(b"IEND", b"")
    )


def render_heatmap(heatmap: Heatmap, path, scale: int = 1):
    """Write the heatmap; ``.png`` paths get PNG, anything else PPM.

    Returns the image size as ``(width, height)``.
    """
    rgb = to_rgb(heatmap, scale)
    path = Path(path)
    payload = encode_png(rgb) if path.suffix.lower() == ".png" else encode_ppm(rgb)
    try:
        path.write_bytes(payload)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    return rgb.shape[1], rgb.shape[0]
