"""Exception hierarchy shared by every layer of the package."""


class CapresError(Exception):
    """Base class for all package errors."""


class NonConvergence(CapresError):
    """A quadrature or iteration ran out of budget before meeting its tolerance."""


class InvalidSupport(CapresError, ValueError):
    """A test function was requested with a support that violates its contract."""


class DomainError(CapresError, ValueError):
    """An argument lies outside the region where the requested formula is valid."""


class ContourCollision(CapresError, ValueError):
    """The evaluation point sits on (or too close to) an integration line."""


class PoleProximity(CapresError, ValueError):
    """The evaluation point is too close to a known pole for a stable evaluation."""


class CrossCheckFailure(CapresError):
    """Two independent computations of the same quantity disagree."""


class GridTooCoarse(CapresError, ValueError):
    """A sampling grid cannot resolve the requested transform."""


class SingularElement(CapresError, ValueError):
    """A group element is not regular where regularity is required."""


class ConfigError(CapresError, ValueError):
    """An experiment configuration failed validation."""
