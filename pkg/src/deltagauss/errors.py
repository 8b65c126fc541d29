"""Exception and warning types shared across the package."""


class ValidationError(ValueError):
    """Input parameters violate a documented precondition."""


class RegimeError(ValidationError):
    """Parameters left the validity regime of an analytic formula."""


class NumericsError(RuntimeError):
    """A numerical procedure failed to reach its accuracy target."""


class QuadratureError(NumericsError):
    """Adaptive quadrature did not converge to the requested tolerance."""


class BoundaryContaminationError(NumericsError):
    """Probability reached the outer edge of a finite simulation domain."""


class RegimeWarning(UserWarning):
    """An asymptotic formula was evaluated near the edge of its validity."""
