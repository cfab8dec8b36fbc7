"""Exception types shared across the package."""


class CasaError(Exception):
    """Base class for all package errors."""


class InvalidInputError(CasaError, ValueError):
    """Human input outside [-1, 1] or non-finite."""


class DimensionError(CasaError, ValueError):
    """Vector dimensions do not agree."""


class EmptyPrefixError(CasaError, ValueError):
    """Requested trajectory prefix contains no steps."""


class InvalidHorizonError(CasaError, ValueError):
    """Planning horizon must be a positive tick count."""


class UnsupportedIntentError(CasaError, TypeError):
    """Operation does not apply to this intent kind."""


class InvalidPriorError(CasaError, ValueError):
    """Prior parameter must be positive."""


class InvalidBetaError(CasaError, ValueError):
    """Rationality coefficient must be positive."""


class IncompleteInputError(CasaError, ValueError):
    """A required per-intent entry is missing."""


class InvalidThresholdError(CasaError, ValueError):
    """Distance threshold must be positive."""


class InvalidArityError(CasaError, ValueError):
    """Operation needs at least two intents."""


class InvalidAlphaError(CasaError, ValueError):
    """Blending coefficient outside [0, 1]."""


class InvalidStateError(CasaError, RuntimeError):
    """Episode or session is not in a state that allows the operation."""


class ScenarioError(CasaError, ValueError):
    """Scenario file is malformed."""
