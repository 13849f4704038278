"""Exception hierarchy shared across the library.

Every error raised on purpose by this package derives from DriftError, so
callers can catch the whole family with one clause while still matching
specific failures when they need to.
"""


class DriftError(Exception):
    """Base class for all errors raised by semdrift."""


class ZeroVectorError(DriftError):
    """A vector's norm is too close to zero to be normalised."""


class DimensionMismatchError(DriftError):
    """Two vectors (or a vector and a space) disagree on dimension."""


class EmptyInputError(DriftError):
    """An operation that needs at least one value received none."""


class CapRadiusTooLargeError(DriftError):
    """A cap radius reached pi/2, where caps stop being convex regions."""


class CoverMismatchError(DriftError):
    """A cover and a slice (or incidence) do not describe the same tokens."""


class FaceActuallyPresentError(DriftError):
    """A horn tag was requested for a face that exists in the complex."""


class TimeOrderViolationError(DriftError):
    """A cross-time operation was asked to run backwards in time."""


class UnknownTokenError(DriftError):
    """A token id does not occur in the slice it was looked up in."""


class UnknownVertexError(DriftError):
    """A vertex id does not belong to the complex it was looked up in."""


class AnchorMismatchError(DriftError):
    """Two records that must share an anchor name different anchors."""


class DegenerateDataError(DriftError):
    """Not enough data to fit the requested projection."""


class TraceFormatError(DriftError):
    """A trace or config file does not match the documented schema."""
