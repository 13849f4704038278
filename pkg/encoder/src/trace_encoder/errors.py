"""Exception types for the encoder package."""


class EncoderError(Exception):
    """Base class for everything this package raises on purpose."""


class ScriptFormatError(EncoderError):
    """The dialogue script violates its schema or turn-order rules."""


class ModelLoadFailureError(EncoderError):
    """The requested encoder model could not be loaded."""


class TokenizationMismatchError(EncoderError):
    """A tracked surface's final character is covered by no token span."""
