from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from swbench.common.errors import UsageError
from swbench.spectral.field import SpectralField
from swbench.spectral.grid import PeriodicGrid


def trapezoid_weights(times: np.ndarray) -> np.ndarray:
    """Quadrature weights w_i with sum_i w_i f(t_i) the trapezoid rule over the sample times."""
    times = np.asarray(times, dtype=float)
    if times.size < 2:
        return np.zeros_like(times)
    gaps = np.diff(times)
    weights = np.zeros_like(times)
    weights[:-1] += gaps / 2
    weights[1:] += gaps / 2
    return weights


@dataclass(frozen=True, eq=False)
class FieldTrajectory:
    """Time-stamped samples of one field; the object Chemin-Lerner norms are taken of."""

    grid: PeriodicGrid
    times: np.ndarray
    coeffs: np.ndarray  # shape (samples, components, *grid.shape)

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if times.ndim != 1 or times.size == 0:
            raise UsageError("A trajectory needs at least one sample time")
        if coeffs.shape[0] != times.size or coeffs.shape[2:] != self.grid.shape:
            raise UsageError(
                f"Coefficient stack {coeffs.shape} does not match {times.size} samples on grid {self.grid.shape}"
            )
        if np.any(np.diff(times) <= 0):
            raise UsageError("Sample times must be strictly increasing")
        times.setflags(write=False)
        coeffs.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_fields(
        cls, times: Sequence[float], fields: Sequence[SpectralField]
    ) -> "FieldTrajectory":
        if len(fields) == 0:
            raise UsageError("Cannot build a trajectory from zero fields")
        grid = fields[0].grid
        if any(f.grid != grid for f in fields):
            raise UsageError("All samples of a trajectory must share one grid")
        return cls(grid, np.asarray(times), np.stack([f.coeffs for f in fields]))

    def __len__(self) -> int:
        return self.times.size

    @property
    def components(self) -> int:
        return self.coeffs.shape[1]

    @property
    def horizon(self) -> float:
        return float(self.times[-1] - self.times[0])

    @cached_property
    def weights(self) -> np.ndarray:
        return trapezoid_weights(self.times)

    @property
    def uniform_stride(self) -> bool:
        gaps = np.diff(self.times)
        return bool(gaps.size == 0 or np.allclose(gaps, gaps[0], rtol=1e-12, atol=0))

    def field_at(self, index: int) -> SpectralField:
        return SpectralField(self.grid, self.coeffs[index])

    def fields(self) -> list[SpectralField]:
        return [self.field_at(i) for i in range(len(self))]

    def map(self, func) -> "FieldTrajectory":
        return FieldTrajectory.from_fields(
            list(self.times), [func(f) for f in self.fields()]
        )

    def __sub__(self, other: "FieldTrajectory") -> "FieldTrajectory":
        if self.grid != other.grid or not np.array_equal(self.times, other.times):
            raise UsageError("Trajectories differ in grid or sample times")
        return FieldTrajectory(self.grid, self.times, self.coeffs - other.coeffs)

    def interpolate(self, t: float) -> SpectralField:
        """Piecewise-linear value at time t inside the sampled interval."""
        if t < self.times[0] or t > self.times[-1]:
            raise UsageError(
                f"Time {t} lies outside the sampled interval [{self.times[0]}, {self.times[-1]}]"
            )
        index = int(np.searchsorted(self.times, t, side="right")) - 1
        if index >= len(self) - 1:
            return self.field_at(len(self) - 1)
        t0, t1 = self.times[index], self.times[index + 1]
        theta = (t - t0) / (t1 - t0)
        return SpectralField(
            self.grid,
            (1 - theta) * self.coeffs[index] + theta * self.coeffs[index + 1],
        )
