"""Exception hierarchy shared by every module."""


class RidgeBoostError(Exception):
    """Base class for all errors raised by ridgeboost."""


class DimensionMismatch(RidgeBoostError, ValueError):
    pass


class InvalidParameter(RidgeBoostError, ValueError):
    pass


class EmptyData(RidgeBoostError, ValueError):
    pass


class DegenerateData(RidgeBoostError, ValueError):
    pass


class NotSymmetric(RidgeBoostError, ValueError):
    pass


class NotFactorizable(RidgeBoostError, ArithmeticError):
    """Raised when jitter escalation is exhausted without a usable factor."""


class NoConvergence(RidgeBoostError, ArithmeticError):
    pass


class EvaluationFailure(RidgeBoostError, RuntimeError):
    """A predictor could not be evaluated on the requested rows."""


class ConfigError(RidgeBoostError, ValueError):
    pass


class SchemaError(RidgeBoostError, ValueError):
    pass


class FileError(RidgeBoostError, OSError):
    pass
