"""Exception types shared across the solver."""


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


class ConfigurationError(ValueError):
    """Invalid grid, problem or run configuration.

    ``problems`` holds every individual complaint when several were
    aggregated into one report.
    """

    def __init__(self, message, problems=None):
        super().__init__(message)
        self.problems = list(problems) if problems else [message]


class AdmissionError(ConfigurationError):
    """Target problem refused: the forcing mass is not positive."""


class ShapeError(ValueError):
    """Field length does not match its grid."""


class UnscalableForcingError(ValueError):
    """A target mass was requested for a profile orthogonal to phi1."""


class SingularSystemError(ArithmeticError):
    def __init__(self, shift, pivot, scale):
        super().__init__(
            f"shifted operator is numerically singular at shift={shift!r} "
            f"(min twisted pivot {pivot:.3e}, scale {scale:.3e})"
        )
        self.shift = shift
        self.pivot = pivot
        self.scale = scale


class NumericalFailure(RuntimeError):
    """An iterative method did not converge."""


class DegenerateLinearizationError(NumericalFailure):
    """The linearized operator has an eigenvalue too close to zero."""


class OverflowGuardError(ArithmeticError):
    """A nodal value exceeded the exponentiation guard (blow-up signal)."""

    def __init__(self, value, guard):
        super().__init__(f"nodal value {value:.6g} exceeds overflow guard {guard:g}")
        self.value = value
        self.guard = guard
