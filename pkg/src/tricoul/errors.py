"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the region where a quantity is defined or validated."""


class PoleError(DomainError):
    """Argument sits on a pole (nonpositive integer)."""


class BranchError(DomainError):
    """Complex square root evaluated on its branch cut."""


class SingularityError(DomainError):
    """Configuration on a screen, where the pair potential is singular."""


class FitQualityError(RuntimeError):
    """Decay fit too poor to report a slope; the fit is attached."""

    def __init__(self, message, fit=None):
        super().__init__(message)
        self.fit = fit


class QuadratureError(RuntimeError):
    """Oscillatory quadrature did not settle within the node budget."""
