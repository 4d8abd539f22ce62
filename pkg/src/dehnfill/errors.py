"""Exception types shared across the package.

Everything derives from DehnFillError so callers can catch the whole family,
and from ValueError so sloppy call sites that only guard against stdlib
exceptions still fail loudly in a familiar way.
"""


class DehnFillError(ValueError):
    """Base class for all errors raised by this package."""


class OutOfDomain(DehnFillError):
    """Radius (or other coordinate) outside the profile's domain."""


class DerivOrderUnsupported(DehnFillError):
    """Profile derivative order other than 0, 1, 2 requested."""


class InvalidMass(DehnFillError):
    """Black-hole mass parameter must be positive."""


class RadiusTooSmall(DehnFillError):
    """Gluing radius too close to the core for the transition to fit."""


class NotInCuspRegion(DehnFillError):
    """Coordinate change to cusp form requested where the cutoff is active."""


class StepTooLarge(DehnFillError):
    """Finite-difference step does not fit inside the domain margin."""


class EigenSolveFailure(DehnFillError):
    """Dense symmetric eigensolve did not converge."""


class NotPrimitive(DehnFillError):
    """Integer coefficient vector has gcd != 1 (or is zero)."""


class InvalidRho(DehnFillError):
    """Defining-function value outside (0, 2]."""


class InvalidWeight(DehnFillError):
    """Weight parameters violate their admissible window."""


class NonFiniteField(DehnFillError):
    """Grid field contains NaN or infinity."""


class GridTooCoarse(DehnFillError):
    """Too few grid points for the requested stencil or seminorm."""


class TooFewSamples(DehnFillError):
    """Torus averaging needs at least 16 sample points per radius."""


class UnknownBlock(DehnFillError):
    """Deformation block label not recognized."""


class SingularAtCore(DehnFillError):
    """Operator assembly requested on a grid touching V = 0."""


class NonPositiveProfile(DehnFillError):
    """Einstein residual requested for a profile that is not positive."""


class AnchorOutsideGrid(DehnFillError):
    """Reconstruction anchor radius not inside the grid."""


class MaxItersExceeded(DehnFillError):
    """Newton iteration hit the iteration cap before the tolerance."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class LineSearchFailed(DehnFillError):
    """Damped Newton step could not reduce the residual."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class ScanMissing(DehnFillError):
    """Perturbation budget needs a decay scan with a fitted slope."""
