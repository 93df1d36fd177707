"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Parameters violate a precondition (resolution guard, grid support, bad field)."""


class OutOfDomainError(ValueError):
    """A query lies outside the range where a quantity is defined."""


class SingularityError(ArithmeticError):
    """The Ermakov amplitude collapsed towards zero during integration."""

    def __init__(self, message, time):
        super().__init__(message)
        self.time = time


class ConservationError(RuntimeError):
    """A quantity that must be conserved drifted beyond its tolerance."""


class EdgeLeakError(RuntimeError):
    """Wavefunction amplitude reached the edge of the periodic grid."""
