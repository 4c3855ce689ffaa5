"""Exception types shared across the package."""


class QuadoscError(Exception):
    """Base class for package-specific errors."""


class SingularIntegral(QuadoscError):
    """A trajectory integral picked up a constant (divergent) integrand."""


class ResidualTimeDependence(QuadoscError):
    """Endpoint substitution left an uncancelled exp(T) factor behind."""


class ResonantDenominator(QuadoscError):
    """A driving term hit a homogeneous mode of the linearized motion."""


class SingularInverse(QuadoscError):
    """The flow-scaling inverse was applied to a flat (constant) term."""


class OddParity(QuadoscError):
    """The operator calculus is defined on even monomials only."""


class TruncationOverflow(QuadoscError):
    """The polynomial ansatz is too small for the requested order."""


class ConvergenceFailure(QuadoscError):
    """The iterative eigensolver missed its residual tolerance."""
