"""
Periodic grids on the torus T^d_a and their Fourier lattices.

The lattice along each axis is k in {-N/2+1, ..., N/2}, i.e. the Nyquist index carries +N/2.
Physical frequencies are xi_i = 2 pi k_i / a_i.
"""

import math
from functools import cached_property

import numpy as np
from pydantic import field_validator, model_validator
from pydantic.dataclasses import dataclass

from swbench.common.constants import (
    DEFAULT_PERIOD,
    MIN_GRID_POINTS,
    SUPPORTED_DIMENSIONS,
)

TORUS_NOTE = "torus surrogate: whole-space low-frequency behaviour (|xi| -> 0) is not represented"
OUTSIDE_THEOREM_NOTE = "outside theorem hypotheses: d=1"


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class PeriodicGrid:
    d: int = 2
    N: int = 64
    a: float | tuple[float, ...] = DEFAULT_PERIOD

    @field_validator("d")
    @classmethod
    def check_dimension(cls, v: int) -> int:
        if v not in SUPPORTED_DIMENSIONS:
            raise ValueError(f"Dimension must be one of {SUPPORTED_DIMENSIONS}, got {v}")
        return v

    @field_validator("N")
    @classmethod
    def check_points(cls, v: int) -> int:
        if v < MIN_GRID_POINTS:
            raise ValueError(f"N must be at least {MIN_GRID_POINTS}, got {v}")
        if v & (v - 1) != 0:
            raise ValueError(f"N must be a power of two, got {v}")
        return v

    @field_validator("a")
    @classmethod
    def check_periods(cls, v: float | tuple[float, ...]) -> float | tuple[float, ...]:
        values = v if isinstance(v, tuple) else (v,)
        if any(not math.isfinite(x) or x <= 0 for x in values):
            raise ValueError(f"Periods must be positive and finite, got {v}")
        return v

    @model_validator(mode="after")
    def check_period_count(self) -> "PeriodicGrid":
        if isinstance(self.a, tuple) and len(self.a) != self.d:
            raise ValueError(
                f"Received {len(self.a)} periods for a {self.d}-dimensional grid"
            )
        return self

    @property
    def periods(self) -> tuple[float, ...]:
        if isinstance(self.a, tuple):
            return self.a
        return (float(self.a),) * self.d

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.d

    @property
    def size(self) -> int:
        return self.N**self.d

    @property
    def volume(self) -> float:
        return float(np.prod(self.periods))

    @property
    def theorem_regime(self) -> bool:
        return self.d >= 2

    @property
    def is_isotropic(self) -> bool:
        return len(set(self.periods)) == 1

    @cached_property
    def integer_wavenumbers(self) -> np.ndarray:
        k = np.fft.fftfreq(self.N, d=1.0 / self.N)
        k[self.N // 2] = self.N // 2
        return _frozen(k)

    @cached_property
    def wavenumbers(self) -> tuple[np.ndarray, ...]:
        axes = [
            2 * np.pi * self.integer_wavenumbers / period for period in self.periods
        ]
        return tuple(_frozen(x) for x in np.meshgrid(*axes, indexing="ij"))

    @cached_property
    def derivative_wavenumbers(self) -> tuple[np.ndarray, ...]:
        """Wavenumbers with the Nyquist plane of their own axis zeroed, used for odd-order symbols."""
        result = []
        for axis, xi in enumerate(self.wavenumbers):
            xi_tilde = xi.copy()
            index = [slice(None)] * self.d
            index[axis] = self.N // 2
            xi_tilde[tuple(index)] = 0.0
            result.append(_frozen(xi_tilde))
        return tuple(result)

    @cached_property
    def xi_norm_sq(self) -> np.ndarray:
        return _frozen(sum(xi**2 for xi in self.wavenumbers))

    @cached_property
    def xi_norm(self) -> np.ndarray:
        return _frozen(np.sqrt(self.xi_norm_sq))

    @cached_property
    def derivative_xi_norm_sq(self) -> np.ndarray:
        return _frozen(sum(xi**2 for xi in self.derivative_wavenumbers))

    @cached_property
    def coordinates(self) -> tuple[np.ndarray, ...]:
        axes = [period * np.arange(self.N) / self.N for period in self.periods]
        return tuple(_frozen(x) for x in np.meshgrid(*axes, indexing="ij"))

    def frequency_index(self, k: tuple[int, ...]) -> tuple[int, ...]:
        """Array index of the integer lattice vector k."""
        if len(k) != self.d:
            raise ValueError(f"Expected a {self.d}-dimensional lattice vector, got {k}")
        half = self.N // 2
        if any(not -half < ki <= half for ki in k):
            raise ValueError(f"Lattice vector {k} is outside the grid's frequency range")
        return tuple(ki % self.N for ki in k)

    def notes(self) -> list[str]:
        notes = [TORUS_NOTE]
        if not self.theorem_regime:
            notes.append(OUTSIDE_THEOREM_NOTE)
        return notes
