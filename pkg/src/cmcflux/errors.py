"""Exception types shared across the package."""


class CMCFluxError(Exception):
    """Base class for all errors raised by cmcflux."""


class DomainError(CMCFluxError, ValueError):
    """An argument lies outside the domain of an operation."""


class SingularityError(CMCFluxError):
    """A parametrization degenerates (|X_u ^ X_v| below threshold)."""


class OracleFailure(CMCFluxError):
    """The finite-difference curvature oracle could not produce a value."""


class QuadratureError(CMCFluxError):
    """Quadrature refinement did not reach the requested tolerance."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class SeedingError(DomainError):
    """No real solution branch exists at the requested seed point."""

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class IntegrationError(CMCFluxError):
    """Curve integration failed part-way; ``s`` is the arclength reached."""

    def __init__(self, message, s=None):
        super().__init__(message)
        self.s = s
