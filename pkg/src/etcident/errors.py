"""Exception types shared across the package."""


class EtcidentError(Exception):
    """Base class for all etcident-specific errors."""


class ImageShapeError(EtcidentError, ValueError):
    """Image dimensions or channel layout violate an operation's contract."""


class JpegDecodeError(EtcidentError):
    """The byte stream is not a well-formed baseline JPEG."""


class UnsupportedJpegError(JpegDecodeError):
    """Well-formed JPEG, but uses a mode outside baseline 4:4:4 support."""


class FeatureFormatError(EtcidentError):
    """A feature file or manifest record could not be parsed."""


class KeyFileError(EtcidentError):
    """A key file is missing required fields or has out-of-range values."""
