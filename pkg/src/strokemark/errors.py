"""Exception hierarchy shared by all strokemark modules."""


class StrokeMarkError(Exception):
    """Base class for all errors raised by this package."""


# --- image I/O ---

class UnsupportedFormat(StrokeMarkError):
    pass


class CorruptFile(StrokeMarkError):
    pass


class IoError(StrokeMarkError):
    pass


# --- metrics ---

class LengthMismatch(StrokeMarkError):
    pass


class DimensionMismatch(StrokeMarkError):
    pass


class ImageTooSmall(StrokeMarkError):
    pass


# --- segmentation ---

class NoTextFound(StrokeMarkError):
    pass


class LineTooNarrow(StrokeMarkError):
    pass


# --- core extraction ---

class NoBlackPixels(StrokeMarkError):
    pass


# --- embedding ---

class EmptyDocument(StrokeMarkError):
    pass


class TooFewLines(StrokeMarkError):
    pass


class EmptyBaseline(StrokeMarkError):
    pass


class InfeasibleTarget(StrokeMarkError):
    pass


class CannotReduce(StrokeMarkError):
    pass


class CannotExpand(StrokeMarkError):
    pass


class OutOfBounds(StrokeMarkError):
    pass


class InsufficientCapacity(StrokeMarkError):
    pass


# --- extraction ---

class InsufficientBits(StrokeMarkError):
    pass


# --- payload ---

class KeyTooShort(StrokeMarkError):
    pass


class PayloadTooLong(StrokeMarkError):
    pass


class ChecksumFailed(StrokeMarkError):
    pass


# --- channel / corpus ---

class InvalidParams(StrokeMarkError):
    pass


class UnknownGlyph(StrokeMarkError):
    pass
