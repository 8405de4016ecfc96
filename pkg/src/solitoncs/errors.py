"""Exception and warning types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid parameters: reversed bounds, non-positive counts, a <= 0, ..."""


class GridMismatchError(ValueError):
    """Two sampled states do not share a grid or a time."""


class TruncationError(ValueError):
    """A series or basis truncation is too small for the requested accuracy."""

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class InvalidTransformationFunction(ValueError):
    """Transformation function has a zero on the grid or fails validity."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class BoundaryTruncationWarning(RuntimeWarning):
    """A function handed to a Fourier integral is not negligible at the window edge."""
