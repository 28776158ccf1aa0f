"""Exception taxonomy.

Everything raised on purpose derives from GpboundsError so the CLI can map
failures to exit codes (config -> 2, numerical -> 3) without string matching.
"""


class GpboundsError(Exception):
    """Base class for all library errors."""


class ConfigError(GpboundsError):
    """Invalid configuration, parameters, or input schema."""


class InvalidParameterError(ConfigError):
    """Parameter outside its mathematical domain (e.g. alpha <= 1)."""


class DomainError(ConfigError):
    """A point lies outside [0,1]^d or off the required grid."""


class DimensionMismatchError(ConfigError):
    """Vector/observation length does not match the design size."""


class NumericalError(GpboundsError):
    """Round-off or conditioning failure during computation."""


class NumericalBreakdownError(NumericalError):
    """A Cholesky pivot (power function value) fell below tolerance."""


class DuplicatePointError(ConfigError):
    """Two points closer than the separation tolerance."""


class ExhaustedCandidatesError(NumericalError):
    """Greedy selection ran out of candidates with nonzero power."""

    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial  # (indices, trace) achieved before exhaustion


class NonsummableTailError(NumericalError):
    """A tail series diverges under the supplied decay model."""


class HypothesisViolationError(NumericalError):
    """A bound's monotonicity/decay hypothesis failed on the checked prefix."""


class TruncationUnreachableError(NumericalError):
    """A truncation tolerance cannot be met by the tail model."""


class JmaxTooSmallError(ConfigError):
    """Spectral truncation degree leaves more tail mass than the budget."""


class FitFailureError(NumericalError):
    """Decay-model regression failed its residual threshold."""
