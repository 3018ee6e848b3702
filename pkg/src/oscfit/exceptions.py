"""Exception types shared across the package."""


class OscillationError(Exception):
    """Base class for everything this package raises on bad data."""


class NoCrossingsError(OscillationError):
    """Fewer than two zero crossings were found in the series."""


class InsufficientPointsError(OscillationError):
    """Not enough characteristic time points to run an estimator."""


class NoEnvelopePointsError(OscillationError):
    """Fewer than two envelope tangency points are available."""


class PipelineError(OscillationError):
    """A pipeline stage failed; ``stage`` names the failing stage."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage


class CsvParseError(OscillationError):
    """A CSV row could not be parsed; ``line_number`` is 1-based."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class NonUniformSpacingError(OscillationError):
    """Time stamps are not on a uniform grid; ``worst_index`` is 0-based."""

    def __init__(self, worst_index: int, message: str):
        super().__init__(message)
        self.worst_index = worst_index


class TooShortError(OscillationError):
    """Fewer than two samples were supplied."""
