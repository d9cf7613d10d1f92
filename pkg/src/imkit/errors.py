"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Invalid argument or input value."""


class ParseError(ValidationError):
    """Malformed edge-list line."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class CapacityError(ValidationError):
    """Input too large for an exact (exponential-time) computation."""
