"""Exception hierarchy shared by all subpackages."""


class OptoclusterError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(OptoclusterError, ValueError):
    """Array dimensions are inconsistent or a graph shape is invalid."""


class DomainError(OptoclusterError, ValueError):
    """An argument lies outside the domain of a function."""


class BogoliubovError(OptoclusterError, ValueError):
    """A matrix pair does not define a Bogoliubov transformation."""


class SynthesisError(OptoclusterError, ValueError):
    """Drive amplitudes cannot be synthesized for the requested state."""


class ConfigError(OptoclusterError):
    """A scenario or sweep configuration cannot be resolved."""


class PhysicsError(OptoclusterError):
    """The requested physical configuration has no valid steady state."""


class StabilityError(PhysicsError):
    """The drift matrix is not Hurwitz."""


class DefinitenessError(PhysicsError):
    """A covariance matrix that must be positive definite is not."""


class RwaError(PhysicsError):
    """The rotating-wave premise is violated."""


class NumericalError(OptoclusterError, ArithmeticError):
    """A linear-algebra kernel failed or produced an inaccurate result."""
