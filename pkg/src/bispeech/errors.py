"""Exception hierarchy.

Every error raised on purpose derives from :class:`BispeechError`.  The CLI
maps :class:`FormatError` subclasses to exit code 2 and everything else to 1.
"""


class BispeechError(Exception):
    """Base class for all package errors."""


class FormatError(BispeechError):
    """Unreadable input: bad container, unknown encoding, corrupt model file."""


# audio_io
class MalformedContainer(FormatError):
    pass


class UnsupportedEncoding(FormatError):
    pass


class EmptyAudio(BispeechError):
    pass


class LengthMismatch(BispeechError):
    pass


# dsp
class NotPowerOfTwo(BispeechError):
    pass


class FrameTooLong(BispeechError):
    pass


class EmptyInput(BispeechError):
    pass


# bispectrum / cepstral
class ClipTooShort(BispeechError):
    pass


class TooFewSegments(BispeechError):
    pass


class DegenerateSignal(BispeechError):
    """Signal carries no energy, so normalized grids are undefined."""


class DegenerateBand(BispeechError):
    pass


# dataset
class UnknownLabel(BispeechError):
    pass


class DuplicatePath(BispeechError):
    pass


class EmptyManifest(BispeechError):
    pass


class ClassTooSmall(BispeechError):
    pass


class TooFewSamples(BispeechError):
    pass


# classify / evaluation
class TooFewRows(BispeechError):
    pass


class SingleClass(BispeechError):
    pass


class SingularCovariance(BispeechError):
    pass


class DimensionMismatch(BispeechError):
    pass


class UnknownClass(BispeechError):
    pass


class SingleClassLabels(BispeechError):
    pass


class UnreadableModel(FormatError):
    pass


# synthgen / viz
class NyquistViolation(BispeechError):
    pass


class EmptyMatrix(BispeechError):
    pass


class IoFailure(FormatError):
    pass
