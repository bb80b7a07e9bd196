"""
Mel spectrogram, MFCC and delta cepstra
=======================================

Short-time features: 25 ms frames every 10 ms, a 26-band mel filterbank
and 13 cepstral coefficients, followed by first and second differences
over time.
"""

import tempfile
from pathlib import Path

import numpy as np

from bispeech import cepstral, synthgen, viz

out = Path(tempfile.mkdtemp(prefix="bispeech-demo-"))
cfg = cepstral.CepstralConfig()
print("frame length, hop, fft size at 16 kHz:", cfg.frame_params(16000))

# the mel filter centres are evenly spaced on the mel scale
peaks = cepstral.filter_peaks_hz(cfg, 16000)
print("first filter centres (Hz):", np.round(peaks[1:6], 1))

# a 1 kHz tone lights up the filter whose centre is nearest 1 kHz
tone = synthgen.generate(synthgen.FixtureSpec(synthgen.Tone(1000.0), 1.0, 16000))
mel = cepstral.mel_spectrogram(tone)
print("loudest band:", np.argmax(mel.mean(axis=0)), "centre", round(peaks[1 + np.argmax(mel.mean(axis=0))], 1), "Hz")

m = cepstral.mfcc(tone)
d1, d2 = cepstral.delta(m), cepstral.delta2(m)
print("mfcc matrix:", m.coeffs.shape)
# a steady tone has nearly constant cepstra, so the deltas are tiny
print("mean |delta|, |delta2|:", np.abs(d1.coeffs).mean(), np.abs(d2.coeffs).mean())

# an amplitude-modulated tone moves c0 with the envelope
am = synthgen.generate(synthgen.FixtureSpec(synthgen.Tone(1000.0), 1.0, 16000, am_depth=0.8, am_rate_hz=4.0))
print("c0 spread, steady vs modulated:", np.ptp(m.coeffs[:, 0]), np.ptp(cepstral.mfcc(am).coeffs[:, 0]))

img = mel.T
viz.render_heatmap(viz.Heatmap(img, (img.min(), img.max())), out / "melspec.ppm", scale=3)
print("mel spectrogram written to", out / "melspec.ppm")
