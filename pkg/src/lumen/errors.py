"""Exception hierarchy shared across the package.

The CLI maps these onto its exit codes: file problems -> 2, bad
parameters -> 3, incompatible inputs -> 4.
"""


class LumenError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(LumenError, ValueError):
    """A parameter is outside its documented range."""


class ImageFormatError(LumenError, OSError):
    """A file could not be read or written as an 8-bit PNG / PPM P6 image."""


class MismatchError(LumenError, ValueError):
    """Two inputs that must be compatible (e.g. same size) are not."""
