from swbench.pydantic_models.reports import BlowUpReport


class SwbenchError(Exception):
    """Root of every error raised on purpose by the workbench."""


class UsageError(SwbenchError, ValueError):
    """Shape/grid mismatch, an operator applied to the wrong kind of field, or a violated hypothesis of a law."""


class VacuumError(SwbenchError, ValueError):
    def __init__(self, minimum: float, threshold: float, context: str = "") -> None:
        self.minimum = minimum
        self.threshold = threshold
        where = f" ({context})" if context else ""
        super().__init__(
            f"Density 1+q reaches {minimum:.3e} <= vacuum threshold {threshold:.1e}{where}"
        )


class BlowUpError(SwbenchError, RuntimeError):
    def __init__(self, report: BlowUpReport) -> None:
        self.report = report
        super().__init__(f"Solver blow-up: {report.describe()}")


class StepSizeError(SwbenchError, ValueError):
    def __init__(self, dt: float, dt_max: float) -> None:
        self.dt = dt
        self.dt_max = dt_max
        super().__init__(f"Step size dt={dt:.3e} is outside (0, {dt_max:.3e}]")


class ResolutionError(SwbenchError, RuntimeError):
    """A requested tolerance cannot be reached with the blocks this grid resolves."""
