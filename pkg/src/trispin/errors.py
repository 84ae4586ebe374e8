"""Exception types raised by the trispin package."""


class TrispinError(Exception):
    """Base class for all trispin-specific failures."""


class InvalidParameterError(TrispinError):
    """Non-finite or otherwise unusable physical parameter."""


class NonHermitianError(TrispinError):
    """A matrix that must be Hermitian is not, beyond tolerance."""


class DegenerateFrequencyError(TrispinError):
    """A transition frequency is zero or two frequencies cannot be separated."""


class StepSizeError(TrispinError):
    """Requested integrator step violates the stability guard."""


class IntegrationError(TrispinError):
    """Time evolution produced an unphysical state."""


class ConvergenceError(TrispinError):
    """A steady-state solve did not reach its residual target."""


class NonUniqueSteadyStateError(TrispinError):
    """The Liouvillian null space is degenerate within tolerance."""


class InvalidStateError(TrispinError):
    """A density matrix violates Hermiticity, trace or positivity bounds."""


class ConfigError(TrispinError):
    """A sweep configuration is malformed or inconsistent."""
