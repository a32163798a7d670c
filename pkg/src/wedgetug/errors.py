"""Exception types shared across the package."""


class WedgeTugError(Exception):
    """Base class for all package-specific errors."""


class DomainError(WedgeTugError, ValueError):
    """An input lies outside the mathematical domain of an operation."""


class ConvergenceError(WedgeTugError, RuntimeError):
    """An iterative routine exhausted its step or iteration budget."""


class AccuracyError(WedgeTugError, RuntimeError):
    """A quadrature or solve could not meet the requested tolerance."""


class OutOfRangeError(WedgeTugError, ValueError):
    """A requested target is outside the attainable range."""


class DegenerateStartError(WedgeTugError, RuntimeError):
    """The local series start and the marched solution disagree at handoff."""


class CriticalPointError(WedgeTugError, ValueError):
    """The gradient is too small for a gradient-direction operator."""


class StrategyViolationError(WedgeTugError, RuntimeError):
    """A strategy returned an illegal move."""


class ConfigError(WedgeTugError, ValueError):
    """A run-configuration file is malformed or incomplete."""
