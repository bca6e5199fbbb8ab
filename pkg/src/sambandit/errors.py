"""Exception types shared across the package."""


class SamBanditError(Exception):
    """Base class for all package errors."""


class ConfigurationError(SamBanditError, ValueError):
    """Invalid parameters or mismatched dimensions."""


class EmptyHistoryError(SamBanditError):
    """Adjusted moments requested before any round was accumulated."""


class NumericError(SamBanditError, ValueError):
    """Non-finite input where a finite value is required."""


class DivergenceError(SamBanditError, ArithmeticError):
    """Solver produced a non-finite objective; the step size was too large."""


class RewardError(SamBanditError):
    """The environment returned an invalid reward."""


class UnsupportedBaselineError(SamBanditError):
    """Baseline policy requested in a mode that cannot support it."""


class DatasetError(SamBanditError, ValueError):
    """Malformed expression file. Message carries the file location."""
