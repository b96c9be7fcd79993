"""
Seeded random fields that do not depend on the grid size.

Coefficients are drawn for the integer modes |k_i| <= kmax in one fixed lexicographic order of the
half-lattice (first nonzero coordinate positive) and mirrored by conjugation, so the same generator
state yields the same band-limited field on every grid that resolves kmax. Nyquist modes are never populated.
"""

import itertools
from functools import lru_cache

import numpy as np

from swbench.common.constants import DEFAULT_RANDOM_KMAX
from swbench.common.errors import UsageError
from swbench.spectral.field import SpectralField
from swbench.spectral.grid import PeriodicGrid
from swbench.spectral.trajectory import FieldTrajectory


@lru_cache(maxsize=32)
def half_lattice(d: int, kmax: int) -> tuple[tuple[int, ...], ...]:
    modes = []
    for k in itertools.product(range(-kmax, kmax + 1), repeat=d):
        first = next((ki for ki in k if ki != 0), 0)
        if first > 0:
            modes.append(k)
    return tuple(modes)


def random_field(
    grid: PeriodicGrid,
    rng: np.random.Generator,
    *,
    components: int = 1,
    kmax: int = DEFAULT_RANDOM_KMAX,
    decay: float = 0.0,
    amplitude: float = 1.0,
) -> SpectralField:
    """Mean-zero real field with Gaussian coefficients weighted by (1 + |k|^2)^(-decay/2)."""
    if kmax >= grid.N // 2:
        raise UsageError(f"kmax={kmax} is not resolved away from Nyquist on N={grid.N}")
    modes = half_lattice(grid.d, kmax)
    draws = rng.standard_normal((len(modes), components, 2))
    coeffs = np.zeros((components,) + grid.shape, dtype=np.complex128)
    for (re_im, k) in zip(draws, modes, strict=True):
        weight = amplitude * (1.0 + sum(ki * ki for ki in k)) ** (-decay / 2.0)
        value = weight * (re_im[:, 0] + 1j * re_im[:, 1]) / 2.0
        coeffs[(slice(None),) + grid.frequency_index(k)] = value
        coeffs[(slice(None),) + grid.frequency_index(tuple(-ki for ki in k))] = np.conj(value)
    return SpectralField(grid, coeffs, mean_zero=True)


def single_mode(
    grid: PeriodicGrid,
    k: tuple[int, ...],
    *,
    amplitude: complex = 1.0,
    components: int = 1,
    component: int = 0,
    real: bool = True,
) -> SpectralField:
    """amplitude * e^{i k.x} in one component; with real=True the conjugate mode is added, giving 2|amplitude| cos."""
    coeffs = np.zeros((components,) + grid.shape, dtype=np.complex128)
    coeffs[(component,) + grid.frequency_index(k)] += amplitude
    if real:
        coeffs[(component,) + grid.frequency_index(tuple(-ki for ki in k))] += np.conj(amplitude)
    return SpectralField(grid, coeffs, mean_zero=not any(k))


def random_trajectory(
    grid: PeriodicGrid,
    rng: np.random.Generator,
    times: np.ndarray,
    *,
    components: int = 1,
    kmax: int = DEFAULT_RANDOM_KMAX,
    decay: float = 0.0,
) -> FieldTrajectory:
    """w0 + w1 cos(pi t / T) + w2 sin(pi t / T) with three independent random fields."""
    times = np.asarray(times, dtype=float)
    horizon = max(float(times[-1]), np.finfo(float).tiny)
    w0, w1, w2 = (
        random_field(grid, rng, components=components, kmax=kmax, decay=decay)
        for _ in range(3)
    )
    phase = (np.pi * times / horizon).reshape((-1,) + (1,) * (grid.d + 1))
    coeffs = w0.coeffs + np.cos(phase) * w1.coeffs + np.sin(phase) * w2.coeffs
    return FieldTrajectory(grid, times, coeffs)
