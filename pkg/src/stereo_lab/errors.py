class StereoLabError(Exception):
    """Base class for toolkit errors."""


class PreconditionError(StereoLabError, ValueError):
    """An input violates an operation's precondition."""


class FormatError(StereoLabError, ValueError):
    """A file does not match the expected on-disk format."""
