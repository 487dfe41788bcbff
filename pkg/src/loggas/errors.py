"""Exception types raised by the library."""


class LoggasError(Exception):
    """Base class for library errors."""


class NotSelfDual(LoggasError):
    pass


class DimensionTooLarge(LoggasError):
    pass


class RouteMismatch(LoggasError):
    pass


class OffLattice(LoggasError):
    pass


class UnsupportedSpec(LoggasError):
    pass


class QuadratureNotConverged(LoggasError):
    pass


class ChainNotAdapted(LoggasError):
    pass


class EigensolverFailure(LoggasError):
    pass


class CollisionDetected(LoggasError):
    pass


class SubstepCapExceeded(LoggasError):
    """Raised when collision substepping hits its cap.

    The partially integrated state is kept on ``state`` and the step
    index on ``step`` so callers can persist what was computed.
    """

    def __init__(self, message, state=None, step=None):
        super().__init__(message)
        self.state = state
        self.step = step


class ZeroVector(LoggasError):
    pass


class RatioNotLessThanOne(LoggasError):
    pass
