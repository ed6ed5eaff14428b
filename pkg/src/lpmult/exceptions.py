class ParameterError(Exception):
    """Raised when a parameter violates its documented range."""


class GridMismatchError(Exception):
    """Raised when fields, weights or families live on different grids."""


class WeightError(Exception):
    """Raised when a power weight is not locally integrable or not in the required A_p class."""


class SupportError(Exception):
    """Raised when a spectral support condition fails."""


class ConfigError(Exception):
    """Raised when a run configuration cannot be parsed or validated."""

    lineno: int | None
    """Line of the offending entry in the configuration file, if known."""

    def __init__(self, message: str, lineno: int | None = None) -> None:
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
