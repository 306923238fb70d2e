"""Exception and warning types shared across the package."""


class GridShapeError(ValueError):
    """Array length does not match the grid it claims to live on."""


class UndefinedFunctionalError(ZeroDivisionError):
    """Functional is undefined for this input (e.g. J(u) at u = 0)."""


class TrivialLimitError(RuntimeError):
    """Ground-state iteration collapsed to the zero field."""


class IterationLimitError(RuntimeError):
    """Solver hit max_iter before reaching tolerance.

    Carries the last defect report in ``report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report if report is not None else {}


class StepSizeError(RuntimeError):
    """A relaxation step diverged (norm grew more than tenfold)."""


class BracketError(RuntimeError):
    """Shooting bisection could not bracket a sign change."""


class OracleFailureError(RuntimeError):
    """Brute-force quadrature oracle failed its own convergence check."""


class InsufficientDataError(ValueError):
    """Not enough samples for the requested fit or scan."""


class WrongRegimeError(ValueError):
    """Analysis applied to a trajectory of the wrong termination kind."""


class InsufficientSequenceError(ValueError):
    """Symmetry-parameter sequences shorter than the supported minimum."""


class CheckpointFormatError(ValueError):
    """Malformed field checkpoint file."""


class TailDominatedWarning(UserWarning):
    """Integrand mass concentrated near the truncation radius."""


class TruncationWarning(UserWarning):
    """Transform pushed field support beyond the grid."""


class AliasingWarning(UserWarning):
    """Resampling likely violates the grid's resolvable-scale limit."""
