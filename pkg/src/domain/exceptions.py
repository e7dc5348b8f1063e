"""
Domain exceptions for the decipherment toolkit.

This module defines the exception hierarchy shared by every layer. Each
failure mode of the toolkit has its own subclass so the entry point can map
it to a stable exit code.
"""


class DecipherError(Exception):
    """
    Base exception for all domain-related errors.

    This serves as the root exception for all decipherment errors,
    allowing for consistent error handling across the layers.
    """

    def __init__(self, message: str = "") -> None:
        """
        Initialize the domain error with an optional message.

        Args:
            message: Error message describing the domain error
        """
        super().__init__(message)


class ValidationError(DecipherError):
    """
    Exception raised when arguments or configuration values are invalid.

    Raised for malformed tokens, out-of-range parameters and unusable
    inputs detected before any computation starts.
    """


class CorpusDecodeError(DecipherError):
    """Exception raised when a corpus line is not valid UTF-8."""

    def __init__(self, line_number: int, message: str = "") -> None:
        """
        Initialize the decode error.

        Args:
            line_number: 1-based number of the offending line
            message: Optional detail from the underlying decoder
        """
        self.line_number = line_number
        detail = f": {message}" if message else ""
        super().__init__(f"Invalid UTF-8 on line {line_number}{detail}")


class ConsistencyError(DecipherError):
    """Exception raised when a corpus token is missing from its vocabulary."""


class DegenerateModelError(DecipherError):
    """Exception raised when a language model cannot be normalized."""


class NumericalDegeneracyError(DecipherError):
    """Exception raised when a posterior has no probability mass at all."""


class EnumerationSizeError(DecipherError):
    """Exception raised when an exact computation would enumerate too many configurations."""


class DivergenceError(DecipherError):
    """
    Exception raised when training produces non-finite weights.

    The iteration at which the weights stopped being finite is kept on the
    instance for reporting.
    """

    def __init__(self, iteration: int, message: str = "") -> None:
        """
        Initialize the divergence error.

        Args:
            iteration: 1-based training iteration that produced the bad weights
            message: Optional extra detail
        """
        self.iteration = iteration
        detail = f": {message}" if message else ""
        super().__init__(f"Training diverged at iteration {iteration}{detail}")


class CoverageError(DecipherError):
    """Exception raised when a gold lexicon does not cover the evaluated words."""

    def __init__(self, missing: list[str]) -> None:
        """
        Initialize the coverage error.

        Args:
            missing: Source words that have no gold translation
        """
        self.missing = list(missing)
        super().__init__(f"Gold lexicon is missing {len(self.missing)} word(s): {', '.join(self.missing)}")


class OOVError(DecipherError):
    """Exception raised when decoding meets a token outside the source vocabulary."""

    def __init__(self, token: str, line_number: int | None = None) -> None:
        """
        Initialize the out-of-vocabulary error.

        Args:
            token: The unknown source token
            line_number: 1-based input line, when decoding a file
        """
        self.token = token
        self.line_number = line_number
        where = f" on line {line_number}" if line_number is not None else ""
        super().__init__(f"Unknown source token{where}: '{token}'")


class GenerationError(DecipherError):
    """Exception raised when a synthetic cipher cannot be generated."""


class ArtifactError(DecipherError):
    """Exception raised when an artifact file cannot be read or written."""
