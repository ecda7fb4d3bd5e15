"""Exception types raised by streamepi."""


class StreamEpiError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(StreamEpiError, ValueError):
    """Invalid parameter or parameter combination."""


class ParseError(StreamEpiError, ValueError):
    """Malformed line in an event file."""

    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class OrderingError(ParseError):
    """Timestamp went backwards in an event file."""


class OracleSizeError(StreamEpiError, ValueError):
    """Input too large for an exhaustive oracle."""
