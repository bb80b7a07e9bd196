"""Regenerate the golden files in this directory.

Run only after a deliberate, reviewed change to the numerics:

    python tests/data/make_goldens.py
"""

from pathlib import Path

from bispeech import audio_io, bispectrum, cepstral, synthgen, viz

HERE = Path(__file__).parent


def tone(freq=440.0, seconds=1.0, sr=16000):
    return synthgen.generate(synthgen.FixtureSpec(synthgen.Tone(freq), seconds, sr))


def coupled_clip():
    kind = synthgen.CoupledTriple(1000.0, 1750.0, coupling=1.0, biphase=0.5)
    return synthgen.generate(synthgen.FixtureSpec(kind, 2.0, 16000, seed=3, snr_db=20.0))


def main():
    cepstral.save_matrix_text(cepstral.mfcc(tone()), HERE / "mfcc_tone440_16k.txt")
    grid = bispectrum.bispectral_grid(coupled_clip(), bispectrum.BispectralConfig(segment_fft_size=128))
    viz.render_heatmap(viz.Heatmap(grid.magnitude), HERE / "bicoherence_coupled_64x64.ppm")
    # the melspec golden goes through a 16-bit WAV so the CLI can reproduce it
    audio_io.write_wav(HERE / "tone1k_16k.wav", tone(1000.0, 0.5))
    mel = cepstral.mel_spectrogram(audio_io.load_wav(HERE / "tone1k_16k.wav")).T
    viz.render_heatmap(viz.Heatmap(mel, (float(mel.min()), float(mel.max()))), HERE / "melspec_tone1k.ppm")


if __name__ == "__main__":
    main()
