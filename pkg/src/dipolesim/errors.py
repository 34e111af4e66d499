"""Exception types shared across the package."""


class DipolesimError(Exception):
    """Base class for all package-specific errors."""


class ScenarioValidationError(DipolesimError):
    """Scenario failed validation; carries the full list of diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


class FrameIncompatibilityError(DipolesimError):
    """No rotating frame renders the Hamiltonian time-independent."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__(
            "inconsistent rotating-frame constraints: " + "; ".join(self.violations)
        )


class DegenerateSteadyStateError(DipolesimError):
    """Liouvillian kernel has dimension > 1; no unique steady state."""

    def __init__(self, kernel_dim):
        self.kernel_dim = kernel_dim
        super().__init__(
            f"Liouvillian kernel is {kernel_dim}-dimensional; steady state is not "
            "unique (provide an initial state to resolve it)"
        )


class IntegrationError(DipolesimError):
    """Time integration failed (step-size underflow or solver error)."""


class PhysicalityError(DipolesimError):
    """A density matrix violated trace/Hermiticity/positivity tolerances."""


class PoleError(DipolesimError):
    """Analytic susceptibility hit an exact pole (all relaxation off)."""

    def __init__(self, nu1):
        self.nu1 = nu1
        super().__init__(f"susceptibility has an exact pole at probe frequency {nu1}")


class ProbeLinearityError(DipolesimError):
    """Probe too strong: halving its amplitude changed the response."""


class SchemeMismatchError(DipolesimError):
    """Scenario does not match the three-plus-three level scheme required
    by the closed-form susceptibility; use the numeric route."""


class ScheduleError(DipolesimError):
    """Invalid pulse-schedule parameters."""
