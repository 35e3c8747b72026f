"""Exception types shared across the package."""


class K3GlueError(Exception):
    """Base class for all package errors."""


class TorsionClass(K3GlueError):
    """A flat bundle class is torsion where a non-torsion class is required."""

    def __init__(self, order, message=None):
        self.order = order
        super().__init__(message or f"class is torsion of order {order}")


class CoverageFailure(K3GlueError):
    """No admissible radius pair lets the inner disks cover the torus."""


class SmallDivisorUnderflow(K3GlueError):
    """A Fourier-mode divisor fell below the configured floor."""

    def __init__(self, mode, magnitude, floor):
        self.mode = mode
        self.magnitude = magnitude
        self.floor = floor
        super().__init__(
            f"divisor at mode {mode} has magnitude {magnitude:.3e} < floor {floor:.3e}"
        )


class IncompatibleCocycle(K3GlueError):
    """A 1-cochain fails the triple-overlap compatibility beyond tolerance."""


class DominationFailure(K3GlueError):
    """Majorant domination B_hat >= B failed at some order (implementation bug)."""


class RankTooSmall(K3GlueError):
    """Requested witness rank exceeds rank(L cap V)."""


class BasePointFixed(K3GlueError):
    """The first base point lies on the fixed locus of some automorphism."""

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"base point p1 is fixed by automorphism {index}")


class SingularCubic(K3GlueError):
    """The supplied plane cubic is singular."""


class DomainError(K3GlueError):
    """A parameter lies outside its declared domain."""


class RangeError(K3GlueError):
    """An integer argument lies outside its declared range."""


class PreconditionError(K3GlueError):
    """A documented precondition was violated."""


class SchemaError(K3GlueError):
    """A scenario config failed schema validation."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
