"""Exception hierarchy shared by all modules."""


class SadicError(Exception):
    """Base class for library errors."""


class InvalidArgumentError(SadicError, ValueError):
    pass


class InvalidStateError(SadicError):
    """An internal invariant (e.g. non-erasing) was found violated."""


class ResourceLimitError(SadicError):
    def __init__(self, message, predicted=None, limit=None):
        super().__init__(message)
        self.predicted = predicted
        self.limit = limit


class InfeasibleError(SadicError):
    """No nonnegative tower lifts the given letter vector."""

    def __init__(self, message, level=None):
        super().__init__(message)
        self.level = level


class NotApplicableError(SadicError):
    pass


class ConvergenceError(SadicError):
    pass
