"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: configuration problems -> 2, infeasible
physics -> 3, numerical failures -> 4.
"""


class SqznoiseError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(SqznoiseError):
    """A run configuration is malformed; the message names the offending field."""


class InfeasibleError(SqznoiseError):
    """The requested physical configuration cannot be realized."""


class AboveThresholdError(InfeasibleError):
    """Pump parameter at or above the parametric oscillation threshold."""


class PhotonBudgetError(InfeasibleError):
    """Total photon number cannot cover the requested pump photons."""


class LossExceedsLinewidthError(InfeasibleError):
    """Loss rate at or above the total cavity linewidth."""


class UnstableSystemError(InfeasibleError):
    """Operation requires a dynamically stable system."""

    def __init__(self, max_real_part: float):
        super().__init__(
            "unstable system: largest eigenvalue real part is "
            f"{max_real_part:+.6g} (must be negative)"
        )
        self.max_real_part = max_real_part


class NumericalError(SqznoiseError):
    """A numerical routine failed in a detectable way."""


class ResonantDegenerateError(NumericalError):
    """Frequency-response solve hit a singular (resonant-degenerate) system."""

    def __init__(self, omega: float):
        super().__init__(f"resonant-degenerate system at omega = {omega!r}")
        self.omega = omega


class EigenSolverError(NumericalError):
    """Eigenvalue solver did not converge; no stability verdict was issued."""
