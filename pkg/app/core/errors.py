"""
Error hierarchy.

Every error knows the process exit code the CLI reports for it:
1 for bad arguments or configuration, 2 for solver/experiment
degradation, 3 for a violated guaranteed inequality (an implementation bug).
"""


class HeavyLSError(Exception):
    """Base class for all laboratory errors."""

    exit_code = 1


class ArgumentError(HeavyLSError, ValueError):
    """Raised when an operation receives out-of-range or malformed input."""


class ConfigurationError(ArgumentError):
    """Raised when a noise/experiment configuration is inconsistent."""


class CapabilityError(ArgumentError):
    """Raised when no closed form exists; the envelope oracle must be used."""


class UnsupportedRegimeError(ArgumentError):
    """Raised for entropy regimes without a rate formula."""


class EvaluationError(HeavyLSError):
    """Raised when a reference function evaluates to a non-finite value."""


class FitError(HeavyLSError):
    """Raised when a regression (growth exponent, rate slope) is degenerate."""

    exit_code = 2


class ConvergenceError(HeavyLSError):
    """Raised when an iterative routine exhausts its step budget."""

    exit_code = 2


class DegradedExperimentError(HeavyLSError):
    """Raised when too many fits of an experiment failed to converge."""

    exit_code = 2


class InvariantViolation(HeavyLSError, AssertionError):
    """Raised when a guaranteed inequality fails numerically."""

    exit_code = 3
