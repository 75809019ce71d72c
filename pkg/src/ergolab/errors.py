"""Exception hierarchy shared across the library.

Validation problems (bad dimensions, malformed configs, missing seeds) exit
the CLI with status 2; resource-cap problems (term explosion, frequency
overflow, cost guards) exit with status 3.
"""


class ValidationError(ValueError):
    """Input rejected before any computation ran."""


class DimensionMismatchError(ValidationError):
    """Point, frequency, or observable dimension does not match the system."""


class CommutationError(ValidationError):
    """A pair of maps required to commute failed the sample check."""


class ResourceCapError(RuntimeError):
    """A declared cost guard (term count, grid size, cloud size) was hit."""


class FrequencyOverflowError(ResourceCapError):
    """Composed character frequency left the checked 63-bit integer range."""

    def __init__(self, message: str, power: int):
        super().__init__(message)
        self.power = power
