"""Exception types shared across the package."""


class InvalidStateError(ValueError):
    """A state violates the model's admissibility requirements.

    Carries optional context (cell index, time, sample index) so solver
    aborts can be reported precisely.
    """

    def __init__(self, message, cell=None, time=None, sample=None):
        parts = [message]
        if cell is not None:
            parts.append(f"cell={cell}")
        if time is not None:
            parts.append(f"t={time:.6g}")
        if sample is not None:
            parts.append(f"sample={sample}")
        super().__init__("; ".join(parts))
        self.cell = cell
        self.time = time
        self.sample = sample


class SolverAbort(RuntimeError):
    """Time integration could not continue (state invalidated mid-run)."""


class ConfigError(ValueError):
    """Invalid or malformed run configuration."""
