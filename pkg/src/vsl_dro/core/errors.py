"""Exception types raised when domain objects are constructed from bad input."""
from __future__ import annotations


class HighwayConfigError(ValueError):
    """An edge or highway description violates its invariants."""


class SampleFormatError(ValueError):
    """A scenario sample (or sample file) does not match the highway.

    ``field`` names the offending quantity; for dimension mismatches
    ``expected`` and ``actual`` carry both lengths.
    """

    def __init__(
        self,
        message: str,
        field: str | None = None,
        expected: int | None = None,
        actual: int | None = None,
    ) -> None:
        if expected is not None and actual is not None:
            message = f"{message} (expected {expected}, got {actual})"
        super().__init__(message)
        self.field = field
        self.expected = expected
        self.actual = actual


class ScheduleError(ValueError):
    """A speed schedule has values outside the menu or a malformed encoding."""


class ConfigError(ValueError):
    """Configuration could not be loaded or failed validation.

    The message always names the dotted field path, or the file line when
    the file itself does not parse.
    """

    def __init__(self, message: str, path: str | None = None) -> None:
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class RadiusTuningError(RuntimeError):
    """No radius on the tuning grid met the requested confidence."""
