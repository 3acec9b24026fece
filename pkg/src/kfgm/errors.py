"""Exception types raised across the package."""


class KfgmError(Exception):
    """Base class for every signal raised by this package."""


class InvalidParameterError(KfgmError, ValueError):
    pass


class SeparatedBranchError(KfgmError, ValueError):
    """The m1 = 0 branch has no transfer-matrix form; use the separated analysis."""


class OutOfRangeError(KfgmError, ValueError):
    pass


class EvanescentRegimeError(KfgmError, ValueError):
    pass


class InternalConsistencyError(KfgmError, RuntimeError):
    pass


class ConvergenceError(KfgmError, RuntimeError):
    pass


class CFLViolationError(KfgmError, ValueError):
    pass


class UnsupportedBoundaryError(KfgmError, ValueError):
    pass


class ConfigError(KfgmError, ValueError):
    """A scenario parsed but holds unknown keys or invalid values."""


class InputParseError(KfgmError, ValueError):
    """An input file could not be read or decoded."""
