"""Slow, obviously-correct reference implementations used as test oracles."""

import cmath
import math

import numpy as np


def naive_dft(x, n=None):
    x = list(x)
    n = len(x) if n is None else n
    x = x + [0.0] * (n - len(x))
    return np.array([
        sum(x[t] * cmath.exp(-2j * math.pi * k * t / n) for t in range(n))
        for k in range(n)
    ])


def direct_dct(x):
    n = len(x)
    out = []
    for k in range(n):
        s = math.fsum(x[i] * math.cos(math.pi * k * (2 * i + 1) / (2 * n)) for i in range(n))
        out.append(s * math.sqrt((1.0 if k == 0 else 2.0) / n))
    return np.array(out)


def brute_moments(values):
    v = [float(a) for a in values]
    n = len(v)
    mu = math.fsum(v) / n
    var = math.fsum((a - mu) ** 2 for a in v) / n
    if var < 1e-24:
        return mu, var, 0.0, 0.0
    sd = math.sqrt(var)
    skew = math.fsum(((a - mu) / sd) ** 3 for a in v) / n
    kurt = math.fsum(((a - mu) / sd) ** 4 for a in v) / n
    return mu, var, skew, kurt


def triple_product_loop(y):
    n = len(y)
    h = n // 2
    out = np.zeros((h, h), dtype=complex)
    for k1 in range(h):
        for k2 in range(h):
            if k1 + k2 < h:
                out[k1, k2] = y[k1] * y[k2] * np.conj(y[k1 + k2])
    return out


def averaged_loop(spectra):
    """(magnitude, phase) grids by explicit per-bin, per-segment loops.

    The DC bin of a real segment is real, so its angle is taken from the
    sign of the real part alone.
    """
    spectra = np.array(spectra, dtype=complex)
    spectra[:, 0] = spectra[:, 0].real
    n = spectra.shape[1]
    h = n // 2
    mag = np.zeros((h, h))
    phase = np.zeros((h, h))
    for k1 in range(h):
        for k2 in range(h):
            if k1 + k2 >= h:
                continue
            m, p = [], []
            for y in spectra:
                m.append(abs(y[k1]) * abs(y[k2]) * abs(y[k1 + k2]))
                a = cmath.phase(y[k1]) + cmath.phase(y[k2]) - cmath.phase(y[k1 + k2])
                while a <= -math.pi:
                    a += 2 * math.pi
                while a > math.pi:
                    a -= 2 * math.pi
                if a <= -math.pi + 1e-12:  # same branch-cut convention
                    a = math.pi
                p.append(a)
            mag[k1, k2] = math.fsum(m) / len(m)
            phase[k1, k2] = math.fsum(p) / len(p)
    return mag, phase


def difference_loop(rows):
    rows = [list(map(float, r)) for r in rows]
    out = [[0.0] * len(rows[0])]
    for t in range(1, len(rows)):
        out.append([a - b for a, b in zip(rows[t], rows[t - 1])])
    return np.array(out)


def frame_mean_loop(interleaved, channels):
    out = []
    for f in range(len(interleaved) // channels):
        out.append(math.fsum(interleaved[f * channels : (f + 1) * channels]) / channels)
    return np.array(out)
