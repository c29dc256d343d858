"""Exception types shared across the package."""


class EmbevalError(Exception):
    """Base class for all package errors."""


class LoadError(EmbevalError):
    """A data file could not be parsed; the message names file and line."""


class ConfigError(EmbevalError):
    """A run configuration failed validation."""


class DegenerateSeriesError(EmbevalError):
    """A correlation was requested on a zero-variance series.

    Raised instead of silently returning 0 or NaN so that pipeline reports
    can never average in garbage.
    """


class ZeroVectorError(EmbevalError):
    """Cosine similarity was requested for a zero vector."""


class DegenerateMatrixError(EmbevalError):
    """A principal component was requested for an all-zero matrix."""


class EvaluationError(EmbevalError):
    """An evaluation could not produce a result (e.g. every pair skipped)."""
