"""Exception types raised by laxpi."""


class LaxpiError(Exception):
    """Base class for all library errors."""


class DescriptorMismatch(LaxpiError, ValueError):
    """Two operands live in different Lie algebras."""


class GridMismatch(LaxpiError, ValueError):
    """Two curves do not share interval and sample grid."""


class OutOfDomain(LaxpiError, ValueError):
    """Matrix logarithm requested outside the principal domain guard."""


class NotInAlgebra(LaxpiError, ValueError):
    """A matrix does not lie in the span of the algebra basis."""


class TruncationFailure(LaxpiError, RuntimeError):
    """A series could not be certified within the depth cap."""


class RadiusExceeded(LaxpiError, ValueError):
    """The a-priori convergence radius guard failed."""


class PosterioriGuardFailed(LaxpiError, RuntimeError):
    """An a-posteriori guard failed during a sweep."""


class NotNilpotent(LaxpiError, ValueError):
    """A nilpotent-only path was requested on a non-nilpotent algebra."""


class ConstancyViolation(LaxpiError, RuntimeError):
    """An iterated transform was expected to be constant but is not."""


class DomainViolation(LaxpiError, ValueError):
    """Operator series evaluated outside its convergence domain."""
