__all__ = [
    'ActionEffectsError',
    'SchemaError',
    'TableError',
    'DegenerateArmError',
    'RankDeficiencyError',
    'ConvergenceError',
    'MatchingError',
    'EstimationError',
    'BootstrapError',
    'ScenarioError',
    'ManifestError',
    'ConfigError',
]


class ActionEffectsError(Exception):
    """Base class for all errors raised by ActionEffects."""


class SchemaError(ActionEffectsError, ValueError):
    """Raised for an invalid schema or schema configuration file."""


class TableError(ActionEffectsError, ValueError):
    """
    Raised when an observation table cannot be loaded or fails validation.

    :param message: Human readable summary.
    :param violations: List of dataset.Violation records behind the failure.
    """

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class DegenerateArmError(TableError):
    """Raised when a treatment arm is empty or carries zero total weight."""


class RankDeficiencyError(ActionEffectsError, ValueError):
    """Raised when a design matrix does not have full column rank."""


class ConvergenceError(ActionEffectsError, RuntimeError):
    """Raised when a non-converged propensity model is used for inference."""


class MatchingError(ActionEffectsError, ValueError):
    pass


class EstimationError(ActionEffectsError, ValueError):
    pass


class BootstrapError(EstimationError):
    """Raised when too many bootstrap replicates fail."""


class ScenarioError(ActionEffectsError, ValueError):
    pass


class ManifestError(ActionEffectsError):
    """Raised when a run directory has no complete artifact manifest."""


class ConfigError(ActionEffectsError, ValueError):
    """Raised for an invalid run configuration."""
