"""Exception types shared across the toolkit."""


class EdbswError(Exception):
    """Base class for all toolkit errors."""


class DomainError(EdbswError, ValueError):
    """An argument lies outside the domain of a function."""


class ParameterError(EdbswError, ValueError):
    """A configuration or keyword parameter is invalid."""


class DimensionError(EdbswError, ValueError):
    """Array shapes are incompatible with the requested operation."""


class SingularityError(EdbswError, ArithmeticError):
    """A frequency response denominator vanished.

    The offending frequency is kept in ``omega``.
    """

    def __init__(self, message, omega=None):
        super().__init__(message)
        self.omega = omega


class ConstructionError(EdbswError):
    """A derived filter bank failed its biorthogonality screen."""

    def __init__(self, message, deviation=None):
        super().__init__(message)
        self.deviation = deviation


class ConvergenceError(EdbswError):
    """An iterative procedure hit its iteration cap."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class StageError(EdbswError):
    """Wraps a failure inside one stage of the detection pipeline."""

    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
