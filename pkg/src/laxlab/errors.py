"""Exception types shared across the laxlab modules."""


class LaxlabError(Exception):
    """Base class for all laxlab-specific errors."""


class InvalidGridError(LaxlabError, ValueError):
    """Grid is too small, mismatched, or a stencil does not fit on it."""


class DivergedValueError(LaxlabError, ArithmeticError):
    """A value that must be finite is NaN or infinite."""


class DivergedOperatorError(LaxlabError, ArithmeticError):
    """Iterated stencil coefficients exceeded the overflow threshold."""


class InvalidProbeError(LaxlabError, ValueError):
    """A probe function is unusable (e.g. identically zero where a ratio is needed)."""


class InsufficientScanError(LaxlabError, ValueError):
    """A scan range is too short to certify the requested bound."""


class ConfigError(LaxlabError, ValueError):
    """Experiment configuration is malformed or contains unknown keys."""
