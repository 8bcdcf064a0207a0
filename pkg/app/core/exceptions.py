"""
Custom Exceptions for the AIS activity pipeline
"""


class AisActivityError(Exception):
    """Base exception for all pipeline errors"""

    def __init__(self, message: str, code: str | None = None):
        self.message = message
        self.code = code or self.__class__.__name__
        super().__init__(self.message)


# Validation Exceptions
class ValidationError(AisActivityError):
    """Input value violates a domain invariant"""

    pass


class InvalidCodeError(ValidationError):
    """AIS vessel type code outside [0, 99]"""

    pass


class UndefinedBearingError(ValidationError):
    """Bearing requested between two identical points"""

    pass


class OutOfBoundsError(ValidationError):
    """Position outside the grid / region of interest"""

    pass


class OutOfRangeError(ValidationError):
    """Time outside a trajectory's span"""

    pass


# Input Exceptions
class InputError(AisActivityError):
    """Record source could not be consumed"""

    pass


class SourceReadError(InputError):
    """Record source missing or unreadable"""

    pass


class InputFormatError(InputError):
    """Too many malformed lines in a record source"""

    pass


# Geometry Exceptions
class CoverageError(AisActivityError):
    """Land mask has no data for a queried position"""

    pass


# Configuration Exceptions
class ConfigError(AisActivityError):
    """Configuration value invalid or inconsistent"""

    pass


# Pipeline Exceptions
class ConsistencyError(AisActivityError):
    """Pipeline intermediate violates an internal invariant"""

    pass


class StageError(AisActivityError):
    """A pipeline stage failed; carries the stage name"""

    def __init__(self, message: str, stage: str, code: str | None = None):
        self.stage = stage
        super().__init__(f"stage={stage}: {message}", code)
