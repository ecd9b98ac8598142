"""Exception types shared across the package."""


class ResunivError(Exception):
    """Base class for package errors."""


class DomainViolationError(ResunivError):
    """A point lies outside the ball it is required to be in."""


class DomainPreservationError(ResunivError):
    """A state trajectory escaped the state ball beyond tolerance."""


class DegenerateMeasureError(ResunivError):
    """A sampling request hit a zero-mass sign component (V+ or V- is 0)."""


class MembershipError(ResunivError):
    """A network is not a member of the bounded-parameter family."""


class FixedPointError(ResunivError):
    """Fixed-point iteration failed to converge (map not contracting)."""


class ConfigError(ResunivError):
    """An experiment config file is missing keys or holds invalid values."""
