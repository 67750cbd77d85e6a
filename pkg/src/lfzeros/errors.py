"""Exception hierarchy shared by all modules."""


class LFZError(Exception):
    """Base class; the CLI maps subclasses to exit codes."""


class ConfigError(LFZError, ValueError):
    pass


class ComputationError(LFZError):
    pass


class PoleError(ComputationError):
    pass


class PrecisionError(ComputationError):
    pass


class ZeroOnPathError(ComputationError):
    def __init__(self, msg, point=None):
        super().__init__(msg)
        self.point = point


class ZeroNearBoundaryError(ComputationError):
    def __init__(self, msg, point=None):
        super().__init__(msg)
        self.point = point


class MaxDepthError(ComputationError):
    pass


class PrimeTableTooSmall(ComputationError):
    pass


class TooManyRejections(ComputationError):
    pass


class BudgetExhausted(ComputationError):
    pass


class InsufficientDecay(ComputationError):
    pass


class QuadratureError(ComputationError):
    pass


class CheckFailed(LFZError):
    pass
