"""Exception types shared across the toolkit."""


class ValidationError(ValueError):
    """Raised when inputs violate a documented precondition or invariant."""


class ParseError(ValidationError):
    """Raised when an input file is malformed; carries a line number when known.

    ``line`` is 1-based and refers to the offending line of the source text,
    or None when the error is not tied to a specific line.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
