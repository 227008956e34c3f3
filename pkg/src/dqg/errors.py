"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid parameter, shape mismatch or malformed configuration."""


class AliasingError(ValueError):
    """A product grid is too small to hold a product without wrap-around."""


class SnapshotFormatError(ValueError):
    """Snapshot file with bad magic, version or length."""


class CFLViolation(RuntimeError):
    """Requested step exceeds the CFL limit for the current velocity."""

    def __init__(self, dt, required_dt):
        super().__init__(f"dt={dt:.3e} exceeds CFL limit {required_dt:.3e}")
        self.dt = dt
        self.required_dt = required_dt


class NumericalBlowupError(RuntimeError):
    """NaN or runaway growth during time stepping."""

    def __init__(self, message, time):
        super().__init__(f"{message} (t={time:.6g})")
        self.time = time
