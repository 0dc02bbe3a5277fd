"""Exception types shared across the package."""


class DimensionError(ValueError):
    """State and table sizes disagree, or an index is out of range."""


class DomainError(ValueError):
    """A parameter or value lies outside the allowed domain."""


class TableParseError(ValueError):
    """An objective file could not be parsed."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class UndefinedExpectationError(ValueError):
    """Expected query count is undefined because no iteration has p_solution > 0."""
