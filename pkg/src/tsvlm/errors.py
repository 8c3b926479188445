"""Exception hierarchy shared across the pipeline."""

from __future__ import annotations


class TsvlmError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(TsvlmError):
    """A corpus file could not be parsed.

    Carries the 1-based line number and, where known, the 1-based column.
    """

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", col {col}" if col is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.col = col


class EmptyCorpus(TsvlmError):
    """The input contained no data rows."""


class StratificationError(TsvlmError):
    """A class is too small to split under strict stratification."""


class LabelMapError(TsvlmError):
    """A label remap did not cover every label in the dataset."""


class ConfigError(TsvlmError):
    """An operation was invoked with invalid configuration."""


class EmptyInput(TsvlmError):
    """An operation requiring at least one value received none."""


class BudgetError(TsvlmError):
    """No downsampling factor can fit the series into the token budget."""


class RenderError(TsvlmError):
    """A series cannot be rendered as a plot image."""


class PathError(TsvlmError):
    """A record id is not safe to use as a filename."""


class EmitError(TsvlmError):
    """Emitted records violate the output format contract."""


class TransportError(TsvlmError):
    """The model endpoint stayed unreachable after retries."""


class ProtocolError(TsvlmError):
    """The model endpoint answered with a malformed response."""
