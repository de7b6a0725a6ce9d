"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid grid, profile, field, scheme or experiment configuration."""


class StabilityError(RuntimeError):
    """Raised when a time step produces non-finite values."""

    def __init__(self, t: float, step_count: int, message: str = "non-finite values"):
        self.t = t
        self.step_count = step_count
        super().__init__(f"{message} at t={t:.6g} (step {step_count})")


class ContaminationError(RuntimeError):
    """A trajectory carried mass into the edge strip of the truncated domain."""
