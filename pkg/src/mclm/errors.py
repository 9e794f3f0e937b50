"""Exception hierarchy shared by all modules."""


class MCLMError(Exception):
    """Base class for every error raised by the package."""


class ConfigurationError(MCLMError, ValueError):
    """Invalid grid size, parameter combination or configuration key."""


class RepresentationError(MCLMError, ValueError):
    """Coefficient data that cannot represent a real periodic function."""


class DomainError(MCLMError, ValueError):
    """Input outside the domain of an operator (e.g. nonzero mean for an inverse)."""


class ChartError(DomainError):
    """Displacement or tangent vector does not vanish at the basepoint."""


class OrientationError(DomainError):
    """Map is not orientation preserving: 1 + f' is not bounded away from zero."""


class NumericalError(MCLMError, RuntimeError):
    """An iterative procedure failed to converge."""


class IntegrityError(MCLMError, RuntimeError):
    """A structural identity (e.g. a vanishing mean) is violated beyond tolerance."""


class StepRejected(MCLMError, RuntimeError):
    """A time step produced a state violating its invariants."""
