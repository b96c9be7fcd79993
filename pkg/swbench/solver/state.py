from dataclasses import dataclass, field, replace

import numpy as np
from pydantic import ConfigDict, model_validator
from pydantic.dataclasses import dataclass as pydantic_dataclass

from swbench.common.constants import DEFAULT_CFL_FACTOR, MAX_CFL_FACTOR
from swbench.common.errors import UsageError
from swbench.pydantic_models.common.constrained_types import PositiveFloat
from swbench.pydantic_models.reports import BlowUpReport
from swbench.solver.pressure import PressureLaw
from swbench.spectral.field import SpectralField, inverse, pointwise_magnitude
from swbench.spectral.grid import PeriodicGrid
from swbench.spectral.trajectory import FieldTrajectory

FIELD_NAMES = ("q", "u", "u_lin", "u_bar")


@dataclass(frozen=True, eq=False)
class SolverState:
    """
    One accepted state of the truncated system: density perturbation q, velocity u and its split
    u = u_lin + u_bar into the free Lame evolution of the initial velocity and the remainder.
    """

    time: float
    q: SpectralField
    u_lin: SpectralField
    u_bar: SpectralField
    u: SpectralField = field(init=False)

    def __post_init__(self) -> None:
        if not self.q.is_scalar:
            raise UsageError("The density perturbation must be a scalar field")
        if self.u_lin.components != self.q.grid.d or self.u_bar.components != self.q.grid.d:
            raise UsageError("Velocity parts must be vector fields")
        object.__setattr__(self, "u", self.u_lin + self.u_bar)

    @property
    def grid(self) -> PeriodicGrid:
        return self.q.grid

    def split_residual(self) -> float:
        """max |u - (u_lin + u_bar)| over the coefficients."""
        return float(np.max(np.abs(self.u.coeffs - self.u_lin.coeffs - self.u_bar.coeffs)))

    def min_density(self) -> float:
        return float(np.min(1.0 + inverse(self.q)))

    def max_velocity(self) -> float:
        return float(np.max(pointwise_magnitude(inverse(self.u))))

    def density_mean(self) -> float:
        return float(abs(self.q.coeffs[(0,) + (0,) * self.grid.d]))

    def is_finite(self) -> bool:
        return all(
            np.all(np.isfinite(f.coeffs)) for f in (self.q, self.u_lin, self.u_bar)
        )


@pydantic_dataclass(frozen=True, kw_only=True, config=ConfigDict(extra="forbid"))
class FlowTerms:
    """Which nonlinear terms of the truncated system are active; all off leaves the pure linear flow."""

    density_advection: bool = True  # u . grad q
    density_compression: bool = True  # (1 + q) div u
    momentum_advection: bool = True  # u . grad u
    viscous_coupling: bool = True  # 2 D(u) . grad ln(1 + q)
    pressure: bool = True  # grad G(1 + q)

    @classmethod
    def linear_only(cls) -> "FlowTerms":
        return cls(
            density_advection=False,
            density_compression=False,
            momentum_advection=False,
            viscous_coupling=False,
            pressure=False,
        )

    def any_active(self) -> bool:
        return any(
            (
                self.density_advection,
                self.density_compression,
                self.momentum_advection,
                self.viscous_coupling,
                self.pressure,
            )
        )


@pydantic_dataclass(frozen=True, kw_only=True, config=ConfigDict(extra="forbid"))
class Schedule:
    """
    Time stepping and sampling (every step when sample_interval is None). A fixed dt is used as given (and must respect the advective bound);
    otherwise every step takes cfl / (n max|u| + 1). Steps are shortened to land on sample times and on T.
    """

    dt: PositiveFloat | None = None
    cfl: PositiveFloat = DEFAULT_CFL_FACTOR
    sample_interval: PositiveFloat | None = None

    @model_validator(mode="after")
    def check_cfl(self) -> "Schedule":
        if self.cfl > MAX_CFL_FACTOR:
            raise ValueError(f"cfl={self.cfl} exceeds the admissible {MAX_CFL_FACTOR}")
        return self


@dataclass(eq=False)
class Trajectory:
    """Accepted samples of one run, in strictly increasing time."""

    grid: PeriodicGrid
    n: float
    law: PressureLaw
    states: list[SolverState] = field(default_factory=list)
    blowup: BlowUpReport | None = None
    steps: int = 0

    def append(self, state: SolverState) -> None:
        if self.states and not state.time > self.states[-1].time:
            raise UsageError(
                f"Sample at t={state.time} does not follow t={self.states[-1].time}"
            )
        self.states.append(state)

    def __len__(self) -> int:
        return len(self.states)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.states])

    @property
    def initial(self) -> SolverState:
        return self.states[0]

    @property
    def final(self) -> SolverState:
        return self.states[-1]

    @property
    def completed(self) -> bool:
        return self.blowup is None

    @property
    def uniform_stride(self) -> bool:
        gaps = np.diff(self.times)
        return bool(gaps.size == 0 or np.allclose(gaps, gaps[0], rtol=1e-10, atol=0))

    def field(self, name: str) -> FieldTrajectory:
        """One of q, u, u_lin, u_bar as a FieldTrajectory for the time norms."""
        if name not in FIELD_NAMES:
            raise UsageError(f"Unknown trajectory field {name}, expected one of {FIELD_NAMES}")
        return FieldTrajectory.from_fields(
            list(self.times), [getattr(s, name) for s in self.states]
        )

    def truncated_to(self, horizon: float) -> "Trajectory":
        """Samples with t <= horizon."""
        kept = [s for s in self.states if s.time <= horizon]
        return replace(self, states=kept)
