"""Exception hierarchy."""


class ErmError(Exception):
    """Base class for all package errors."""


class ConfigurationError(ErmError, ValueError):
    pass


class CapacityError(ErmError):
    pass


class KernelEvaluationError(ErmError, ValueError):
    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class DomainError(ErmError, ValueError):
    pass


class UnsupportedOrderError(ErmError, ValueError):
    pass


class SolverError(ErmError):
    pass


class InequalityViolation(ErmError, AssertionError):
    pass


class DataFormatError(ErmError, ValueError):
    pass
