"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class CarnotError(Exception):
    """Base class for all library errors."""


class ParseError(CarnotError, ValueError):
    """Malformed input text; carries an optional (line, column) location."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class ValidationError(CarnotError, ValueError):
    """Well-formed input that violates a mathematical precondition."""


class CoverageError(CarnotError):
    """A sampled graph does not cover the region an operation needs."""


class LineSearchError(CarnotError):
    """Armijo backtracking gave up; ``state`` holds the last iterate info."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state or {}
