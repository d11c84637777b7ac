"""Exception and warning types shared across the package."""


class MopError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(MopError):
    """Invalid configuration or argument combination."""


class NumericalError(MopError):
    """A numerical procedure failed a hard validity check."""


class ConsistencyFail(NumericalError):
    """A recovered quantity disagrees with its exactly known value."""


class DegreeOverflow(NumericalError):
    """Interpolated degree exceeds the structural degree bound."""


class ParityViolation(NumericalError):
    """A deflated zero fails its realness or half-line sign test."""


class SizeGuard(MopError):
    """Input exceeds a hard combinatorial size guard."""


class InfeasiblePrefix(MopError):
    """A 0/1 prefix cannot be completed into a valid pattern."""


class SizeMismatch(NumericalError):
    """Block bookkeeping in the bidiagonal reduction is inconsistent."""


class BoundaryCollision(NumericalError):
    """Two-sided boundary values landed in the same branch ordering."""


class AdmissibilityFail(MopError):
    """A measure vector violates the support or total mass constraints."""


class RootCollision(NumericalError):
    """Branch roots collide within the tie tolerance."""


class DegenerateX(NumericalError):
    """Eigenbasis undefined because branch roots collide at this point."""


class Stagnation(NumericalError):
    """An iteration plateaued above its convergence threshold."""


class IllConditionedWarning(UserWarning):
    """Companion balancing left a large coefficient spread."""


class CountMismatchWarning(UserWarning):
    """Detected interval count disagrees with the closed-form count."""
