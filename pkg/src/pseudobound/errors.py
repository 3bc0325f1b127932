"""Exception taxonomy shared by all modules."""


class PseudoboundError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(PseudoboundError):
    """A spec, parameter set, or bandwidth is structurally invalid."""


class EmptyInputError(PseudoboundError):
    """An operation received an empty collection it cannot work on."""


class DegenerateInputError(PseudoboundError):
    """Inputs are non-empty but unusable (no positives, one identity, ...)."""


class InvalidNoiseError(PseudoboundError):
    """Noise rates violate rho_neg + rho_pos < 1 or lie outside [0, 1)."""


class UndefinedRateError(PseudoboundError):
    """A class-conditional rate is requested for an absent true class."""


class InsufficientDataError(PseudoboundError):
    """Too few values for the requested statistic (quartiles need >= 4)."""


class NumericError(PseudoboundError):
    """Numerical failure: divergence, singular covariance, non-finite values."""


class PipelineError(PseudoboundError):
    """A self-learning run failed; carries the iteration it failed in."""

    def __init__(self, message, iteration=None, partial=None):
        super().__init__(message)
        self.iteration = iteration
        self.partial = partial
