"""Exception types raised by the library (CLI maps them to exit code 2)."""


class DomainError(Exception):
    """Base class for mathematically meaningful failures."""


class ResonanceError(DomainError):
    """The resonance set does not have the single element the construction needs."""


class CompatibilityViolation(DomainError):
    """Right-hand side is not orthogonal to the kernel, so it is outside the range."""


class NoBifurcation(DomainError):
    """The amplitude equation has no nontrivial root for these parameters."""


class Beta2Zero(DomainError):
    """Cubic coefficient of the amplitude equation vanishes."""


class OrderUnsupported(DomainError):
    """Requested expansion order exceeds the configured maximum."""


class EquivarianceError(DomainError):
    """A computed bifurcation term breaks the time-shift equivariance law."""
