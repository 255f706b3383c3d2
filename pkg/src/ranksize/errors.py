"""Exception types raised by ranksize.

Everything derives from :class:`RankSizeError` (itself a ``ValueError``) so
callers and the CLI can separate bad data from I/O failures.
"""


class RankSizeError(ValueError):
    pass


class ParseError(RankSizeError):
    """Malformed input; ``line`` is 1-based or None when not line-specific."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class TooFewRecordsError(RankSizeError):
    pass


class ModelDomainError(RankSizeError):
    pass


class SingularDesignError(RankSizeError):
    pass


class FitError(RankSizeError):
    pass
