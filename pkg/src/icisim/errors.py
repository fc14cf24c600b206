"""Exception hierarchy shared across the toolkit.

The CLI maps these onto stable exit codes: scenario/schema problems -> 2,
infeasibility -> 3, runtime domain violations -> 4.
"""


class IcisimError(Exception):
    """Base class for all toolkit errors."""


class ScenarioError(IcisimError):
    """Malformed scenario file or invalid input data (exit code 2)."""


class InfeasibleError(IcisimError):
    """No equilibrium exists for the requested operating point (exit code 3)."""


class DroopCapabilityError(InfeasibleError):
    """Power mismatch exceeds what the droop quadratic can absorb."""


class SecurityConstraintError(InfeasibleError):
    """Equilibrium angles would leave the open box (-pi/2, pi/2)^m."""


class DomainError(IcisimError):
    """State left the model's domain, e.g. a frequency hit zero (exit code 4).

    Carries the simulation time of the violation when raised by the
    integrator.
    """

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time
