"""Exception hierarchy shared by every module of the package."""


class FracRDError(Exception):
    """Base class for all errors raised by :mod:`fracrd`."""


class ConfigError(FracRDError, ValueError):
    """Invalid parameters, grids or configuration files."""


class ComputationError(FracRDError, ArithmeticError):
    """Non-finite data or a broken conjugate symmetry."""


class DivergedError(FracRDError):
    """A trajectory blew up (non-finite or above the magnitude cap).

    Attributes
    ----------
    step_index : int
        Index of the step whose result failed the check.
    summary : RunSummary or None
        Partial summary of the run up to the failure, when available.
    """

    def __init__(self, message, step_index, summary=None):
        super().__init__(message)
        self.step_index = step_index
        self.summary = summary


class FormatError(FracRDError):
    """Malformed snapshot file (bad magic, version or length)."""


class IoError(FracRDError, OSError):
    """Failure writing an output file."""
