"""Exception types shared across the pipeline.

Each error maps to a distinct CLI exit code (see ``phaseless1d.cli``).
"""


class PhaselessError(Exception):
    """Base class for all package errors."""


class ConfigError(PhaselessError, ValueError):
    """Invalid input: bad potential description, positions, grids or flags."""


class InvalidPotential(ConfigError):
    pass


class CoincidentPositions(ConfigError):
    pass


class IntegrationFailure(PhaselessError, RuntimeError):
    pass


class DegenerateConfiguration(PhaselessError, ValueError):
    """The recovery linear system is (numerically) singular.

    ``value`` carries the offending determinant-like quantity.
    """

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class NonPhysicalIntensity(PhaselessError, ValueError):
    def __init__(self, message, radicand=None):
        super().__init__(message)
        self.radicand = radicand


class InversionError(PhaselessError, RuntimeError):
    pass


class TruncationError(InversionError):
    pass


class IllConditioned(InversionError):
    def __init__(self, message, rcond=None):
        super().__init__(message)
        self.rcond = rcond
