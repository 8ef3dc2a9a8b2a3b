"""Exception types raised across the package."""


class MorphosegError(Exception):
    """Base class for all package errors."""


class FormatError(MorphosegError, ValueError):
    """An image or gradient file could not be decoded."""


class ParameterError(MorphosegError, ValueError):
    """An algorithm parameter is outside its valid range."""


class ShapeError(MorphosegError, ValueError):
    """Two images that must share a shape do not."""


class PreconditionError(MorphosegError, ValueError):
    """An ordering or partition precondition does not hold."""


class LabelRangeError(MorphosegError, ValueError):
    """Label values do not fit the output container."""
