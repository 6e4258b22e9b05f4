# utils/error_handler.py
"""
Error types and failure bookkeeping for the Koszul engine.
Fatal problems raise a KoszulError subclass; recoverable failures
(one grid level of a convergence study, one CLI stage) are recorded
in an ErrorHandler so a run can continue and still report them.
"""

import time

from loguru import logger


class KoszulError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatchError(KoszulError):
    """Operands live in different ambient dimensions or coefficient algebras."""


class DegreeCapError(KoszulError):
    """A symbolic result exceeded the configured total-degree cap."""


class PolyParseError(KoszulError):
    """Malformed polynomial or form text."""

    def __init__(self, message, line=1, column=1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class GridSpecError(KoszulError):
    """A PolydiscSpec or CutoffSpec violates its invariants."""


class SpecMismatchError(KoszulError):
    """Grid fields built over different PolydiscSpecs were combined."""


class NonFiniteSampleError(KoszulError):
    """A sampled value at a masked node is NaN or infinite."""


class VanishingError(KoszulError):
    """The input function does not vanish at the basepoint."""


class QuadratureError(KoszulError):
    """A quadrature rule failed to converge."""


class ClosednessError(KoszulError):
    """A dbar problem was handed a form that is not dbar-closed."""

    def __init__(self, message, measured=None, tolerance=None):
        super().__init__(message)
        self.measured = measured
        self.tolerance = tolerance


class SolverBreakdownError(KoszulError):
    """The polydisc solver stopped making progress."""


class GateError(KoszulError):
    """A pipeline gate measured a residual far beyond its tolerance."""

    def __init__(self, stage, message, measured=None, tolerance=None):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
        self.measured = measured
        self.tolerance = tolerance


class ConfigError(KoszulError):
    """Invalid run configuration (usage error)."""


class ErrorHandler:
    """Record recoverable errors per source (pipeline stage, grid level)."""

    def __init__(self):
        """Initialize error handler."""
        self.error_count = {}
        self.last_errors = {}

    def log_error(self, source, error):
        """
        Log an error for a specific source.

        Args:
            source (str): Source name (e.g. 'M=32', 'descent')
            error (Exception): The error that occurred
        """
        self.error_count[source] = self.error_count.get(source, 0) + 1
        self.last_errors[source] = {
            'error': str(error),
            'type': type(error).__name__,
            'timestamp': time.time()
        }

        logger.error(f"Error in {source}: {error}")
        logger.debug(f"Total errors for {source}: {self.error_count[source]}")

    def has_errors(self, source=None):
        """Check whether any (or one source's) errors were recorded."""
        if source is None:
            return bool(self.error_count)
        return self.error_count.get(source, 0) > 0

    def summary(self):
        """
        Summarize recorded errors without timestamps.

        Returns:
            dict: source -> {'count', 'type', 'error'}
        """
        return {
            source: {
                'count': self.error_count[source],
                'type': self.last_errors[source]['type'],
                'error': self.last_errors[source]['error'],
            }
            for source in sorted(self.error_count)
        }

