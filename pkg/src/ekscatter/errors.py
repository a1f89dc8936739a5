"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """An argument is outside the domain an operation accepts."""


class ResourceError(MemoryError):
    """A table or buffer could not be allocated."""

    def __init__(self, message, nbytes=None):
        super().__init__(message)
        self.nbytes = nbytes


class InvariantViolation(RuntimeError):
    """An internal consistency check failed; indicates a bug, not bad input."""
