"""Semantic exception hierarchy shared across the package.

Public functions raise these instead of bare ValueError so callers (and the
CLI) can distinguish contract violations from genuine numerical failures.
"""


class EdgeAtlasError(Exception):
    """Base class for all package errors."""


class DomainError(EdgeAtlasError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class DegenerateDistributionError(DomainError):
    """Zero-variance Gaussian requested where a density is needed."""


class UnsupportedActivationError(EdgeAtlasError):
    """Operation requires properties (e.g. injectivity) the activation lacks."""


class CorrelationLengthUndefined(EdgeAtlasError):
    """chi >= 1: the layer-to-layer correlation does not decay, so no finite
    correlation length exists (chi == 1 is the divergent critical case)."""

    def __init__(self, chi_value: float):
        self.chi_value = chi_value
        super().__init__(
            f"no finite correlation length for chi = {chi_value!r} (>= 1)"
        )


class SolverError(EdgeAtlasError):
    """Iterative solver failed; carries the last iterate for diagnostics."""

    def __init__(self, message: str, last_iterate=None, iterations: int = 0):
        self.last_iterate = last_iterate
        self.iterations = iterations
        super().__init__(message)


class NoCriticalPointError(EdgeAtlasError):
    """No chi = 1 solution in the searched bracket for this weight variance."""


class OutOfQuadrantError(EdgeAtlasError):
    """Computed phase point has a negative coordinate (unphysical)."""


class FitError(EdgeAtlasError):
    """Least-squares fit could not be performed (e.g. rank deficiency)."""


class DegenerateFitError(FitError):
    """Threshold fit found no interior knee; message carries diagnostics."""


class NoPositiveSolutionError(EdgeAtlasError):
    """Analytic threshold has no positive weight-variance solution."""


class IdxFormatError(EdgeAtlasError):
    """Base class for IDX file parse failures."""


class MagicNumberError(IdxFormatError):
    """IDX magic number does not match the expected record type."""


class TruncatedFileError(IdxFormatError):
    """IDX payload shorter than its header promises."""


class CountMismatchError(IdxFormatError):
    """Image and label files disagree on the number of records."""


class TrainingDivergedError(EdgeAtlasError):
    """Loss became non-finite during training; carries the partial record."""

    def __init__(self, message: str, record=None):
        self.record = record
        super().__init__(message)


class ConfigError(EdgeAtlasError):
    """Run configuration failed schema validation."""
