"""
Numerical kernels shared by the bispectral and cepstral pipelines.

The FFT is an iterative radix-2 decimation-in-time transform vectorized over
leading axes, so a whole stack of frames goes through one call.  The forward
transform carries no normalization factor.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import EmptyInput, FrameTooLong, NotPowerOfTwo

__all__ = [
    "RECTANGULAR",
    "HANN",
    "window",
    "is_power_of_two",
    "next_power_of_two",
    "fft",
    "power_spectrum",
    "frame_signal",
    "dct_ii",
]

RECTANGULAR = "rectangular"
HANN = "hann"


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def next_power_of_two(n: int) -> int:
    return 1 << max(0, int(n - 1).bit_length())


def window(kind: str, length: int) -> np.ndarray:
    """Window weights of the given kind; Hann is the symmetric form."""
    if kind == RECTANGULAR:
        return np.ones(length)
    if kind == HANN:
        if length == 1:
            return np.ones(1)
        n = np.arange(length)
        return 0.5 * (1.0 - np.cos(2.0 * np.pi * n / (length - 1)))
    raise ValueError(f"unknown window kind {kind!r}")


@lru_cache(maxsize=32)
def _plan(n: int):
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    twiddles = []
    m = 2
    while m <= n:
        tw = np.exp(-2j * np.pi * np.arange(m // 2) / m)
        tw.setflags(write=False)
        twiddles.append(tw)
        m *= 2
    rev.setflags(write=False)
    return rev, tuple(twiddles)


def fft(frame, fft_size: int) -> np.ndarray:
    """Forward DFT along the last axis, zero-padded to ``fft_size``.

    ``bin[k] = sum_n frame[n] * exp(-2j*pi*k*n/fft_size)``.
    """
    if not is_power_of_two(fft_size):
        raise NotPowerOfTwo(f"fft_size must be a power of two, got {fft_size}")
    x = np.asarray(frame)
    if x.shape[-1] > fft_size:
        raise FrameTooLong(f"frame of length {x.shape[-1]} exceeds fft_size {fft_size}")
    lead = x.shape[:-1]
    buf = np.zeros(lead + (fft_size,), dtype=np.complex128)
    buf[..., : x.shape[-1]] = x
    rev, twiddles = _plan(fft_size)
    buf = buf[..., rev]
    for tw in twiddles:
        half = tw.shape[0]
        blocks = buf.reshape(lead + (fft_size // (2 * half), 2, half))
        even = blocks[..., 0, :]
        odd = blocks[..., 1, :] * tw
        buf = np.stack((even + odd, even - odd), axis=-2).reshape(lead + (fft_size,))
    return buf


def power_spectrum(spectrum) -> np.ndarray:
    s = np.asarray(spectrum)
    return s.real ** 2 + s.imag ** 2


def frame_signal(samples, frame_len: int, hop: int) -> np.ndarray:
    """Complete frames ``samples[i*hop : i*hop + frame_len]`` as rows of a copy."""
    if frame_len < 1 or hop < 1:
        raise ValueError("frame_len and hop must be >= 1")
    x = np.asarray(samples, dtype=np.float64)
    if len(x) < frame_len:
        return np.empty((0, frame_len))
    count = (len(x) - frame_len) // hop + 1
    idx = hop * np.arange(count)[:, None] + np.arange(frame_len)[None, :]
    return x[idx]


@lru_cache(maxsize=16)
def _dct_basis(n: int) -> np.ndarray:
    k = np.arange(n)[:, None]
    i = np.arange(n)[None, :]
    basis = np.cos(np.pi * k * (2 * i + 1) / (2 * n))
    basis *= np.sqrt(2.0 / n)
    basis[0] = np.sqrt(1.0 / n)
    basis.setflags(write=False)
    return basis


def dct_ii(values) -> np.ndarray:
    """Orthonormal DCT-II along the last axis."""
    x = np.asarray(values, dtype=np.float64)
    if x.ndim == 0 or x.shape[-1] == 0:
        raise EmptyInput("dct_ii needs at least one value")
    # broadcast-and-sum instead of a matmul: BLAS picks different kernels for
    # vectors and matrices, and a row must transform to the same bits either way
    return (x[..., None, :] * _dct_basis(x.shape[-1])).sum(axis=-1)
