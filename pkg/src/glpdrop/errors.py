"""Exception hierarchy shared by all modules."""


class GLPError(Exception):
    """Base class for all package errors."""


class DomainError(GLPError, ValueError):
    """Argument outside the domain of a function."""


class NoDoubleWellError(DomainError):
    """beta <= 1: the local free energy has a single well."""


class ConvexityLossError(DomainError):
    """F'' is not positive at the requested level."""


class NoDipError(DomainError):
    """The tilted potential G has no negative dip for this n."""


class ParameterError(DomainError):
    """Nonpositive physical constant or otherwise invalid parameter."""


class ResolutionError(DomainError):
    """Grid too coarse to resolve the kernel range."""


class GeometryError(DomainError):
    """Droplet or collar does not fit in the torus."""


class SaturationError(DomainError):
    """Constructed values leave the admissible band."""


class InfeasibleError(DomainError):
    """No field with the requested mean exists inside the clip band."""


class SlicingError(DomainError):
    """Level-set slicing degenerates (kappa >= m_beta)."""


class ConstraintError(DomainError):
    """Mean-zero or mean-n constraint violated."""


class StateError(GLPError, RuntimeError):
    """Operation applied to an object in the wrong state."""


class ConvergenceError(GLPError, RuntimeError):
    """Iterative solver failed; ``best`` holds the best partial result."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
