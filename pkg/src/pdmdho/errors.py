"""Exception types raised across the package."""


class PdmError(Exception):
    """Base class for every error raised by pdmdho."""


class DomainError(PdmError, ValueError):
    """A coordinate, parameter or trajectory left a profile's validity domain."""


class QuadratureError(PdmError, ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""


class ConvergenceError(PdmError, ArithmeticError):
    """A root finder ran out of iterations."""


class StepBudgetExceeded(PdmError, RuntimeError):
    """The integrator used up its step budget before reaching the end time."""


class StepUnderflow(PdmError, RuntimeError):
    """The step size collapsed below the resolvable limit.

    Usually a sign of stiffness or of a singularity ahead of the trajectory.
    """


class InsufficientCrossings(PdmError, ValueError):
    """Too few zero crossings in the span for a timing comparison."""


class ConfigError(PdmError, ValueError):
    """A scenario configuration could not be turned into a valid scenario."""
