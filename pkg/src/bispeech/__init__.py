"""
Bispectral and cepstral features for telling human from synthesized speech.

Submodules:

``audio_io``      WAV decoding, mono mixdown, trimming
``dsp``           FFT, windows, framing, DCT-II
``bispectrum``    segment-averaged bispectrum and bicoherence grids
``cepstral``      mel spectrogram, MFCC, delta and delta-delta
``features``      the 14-number feature vector and its CSV format
``dataset``       manifests, stratified splits, k-fold indices
``classify``      kNN, LDA, QDA, logistic regression, SMO-trained SVMs
``evaluation``    confusion matrices, ROC/AUC, cross-validation
``viz``           PPM/PNG heatmaps
``synthgen``      deterministic phase-coupled test signals and corpora
"""

from . import audio_io, bispectrum, cepstral, classify, dataset, dsp, evaluation, features, synthgen, viz
from .audio_io import AudioClip, load_wav, prepare, to_mono, trim, write_wav
from .bispectrum import BicoherenceGrid, BispectralConfig, bispectral_grid, bicoherence
from .cepstral import CepstralConfig, MfccMatrix, mel_spectrogram, mfcc
from .classify import TrainedModel, load_model, predict, predict_scores, save_model, train
from .errors import BispeechError, FormatError
from .evaluation import cross_validate, roc_auc
from .features import FEATURE_NAMES, FeatureVector, extract_features, moments

__version__ = "0.1.0"
