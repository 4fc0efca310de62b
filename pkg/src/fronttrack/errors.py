"""Exception types shared across the package."""


class DomainError(ValueError):
    """A state left the admissible region (v <= 0, e <= 0, T <= 0, ...)."""


class NoSolution(RuntimeError):
    """The Riemann pressure iteration failed (vacuum-adjacent data)."""


class NoConvergence(RuntimeError):
    """Newton iteration for the wave-curve decomposition did not converge."""


class StepTooLarge(RuntimeError):
    """Reaction step eps*phi(T) >= 1 somewhere; the explicit update would be invalid."""


class CollisionCascade(RuntimeError):
    """The event loop exceeded its configured event budget."""


class ValidationError(ValueError):
    """Bad configuration or input file."""
