"""
FFT and DCT-II kernels
======================

The package carries its own radix-2 FFT and orthonormal DCT-II so that
every number in the pipeline is reproducible bit for bit.  Here they are
compared against numpy's FFT and a direct cosine sum.
"""

import numpy as np

from bispeech import dsp

rng = np.random.default_rng(0)

# a batch of 64-sample frames, transformed row by row
frames = rng.standard_normal((8, 64))
spec = dsp.fft(frames, 64)
print("max |fft - numpy|:", np.abs(spec - np.fft.fft(frames)).max())

# short frames are zero-padded up to the FFT size
short = dsp.fft(np.ones(3), 8)
print("|fft| of [1, 1, 1] padded to 8:", np.round(np.abs(short), 3))

# orthonormal DCT-II against its defining sum
x = rng.standard_normal(26)
n = np.arange(26)
direct = np.array([
    np.sqrt((1 if k == 0 else 2) / 26) * np.sum(x * np.cos(np.pi * k * (2 * n + 1) / 52))
    for k in range(26)
])
print("max |dct - direct|:", np.abs(dsp.dct_ii(x) - direct).max())

# the transform is orthonormal, so energy is kept
print("energy in / out:", np.sum(x ** 2), np.sum(dsp.dct_ii(x) ** 2))

# power spectrum of a Hann-windowed frame
w = dsp.window(dsp.HANN, 64)
p = dsp.power_spectrum(dsp.fft(np.cos(2 * np.pi * 8 * np.arange(64) / 64) * w, 64))
print("strongest bins:", sorted(np.argsort(p)[-2:].tolist()))
