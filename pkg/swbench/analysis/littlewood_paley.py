"""
Dyadic partition of unity and the block operators built on it.

chi is the radial profile 1 - g((r - 3/4) / (4/3 - 3/4)) with the C-infinity transition
g(t) = f(t) / (f(t) + f(1 - t)), f(t) = exp(-1/t) for t > 0. Then phi(xi) = chi(xi/2) - chi(xi)
is supported in 3/4 <= |xi| <= 8/3 and
    Delta_j = phi(2^-j D),  S_j = chi(2^-j D) = sum_{k <= j-1} Delta_k + (zero mode).
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from loguru import logger

from swbench.common.constants import (
    BLOCK_SEARCH_MARGIN,
    CHI_INNER_RADIUS,
    CHI_OUTER_RADIUS,
)
from swbench.common.errors import UsageError
from swbench.spectral.field import SpectralField
from swbench.spectral.grid import PeriodicGrid

OUTSIDE_RANGE_FLAG = "block-outside-range"


def _transition_kernel(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    positive = t > 0
    out[positive] = np.exp(-1.0 / t[positive])
    return out


def smooth_step(t: np.ndarray) -> np.ndarray:
    """0 for t <= 0, 1 for t >= 1, C-infinity and increasing in between."""
    f = _transition_kernel(t)
    g = _transition_kernel(1.0 - np.asarray(t, dtype=float))
    return f / (f + g)


def chi(r: np.ndarray) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    return 1.0 - smooth_step((r - CHI_INNER_RADIUS) / (CHI_OUTER_RADIUS - CHI_INNER_RADIUS))


def phi(r: np.ndarray) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    return chi(r / 2.0) - chi(r)


@dataclass(frozen=True, eq=False)
class DyadicPartition:
    grid: PeriodicGrid
    j_min: int
    j_max: int

    @property
    def j_range(self) -> range:
        return range(self.j_min, self.j_max + 1)

    def __contains__(self, j: int) -> bool:
        return self.j_min <= j <= self.j_max

    def phi_weights(self, j: int) -> np.ndarray:
        """phi(2^-j xi) sampled on the lattice."""
        return _phi_table(self.grid, j)

    def chi_weights(self, j: int) -> np.ndarray:
        """chi(2^-j xi) sampled on the lattice."""
        return _chi_table(self.grid, j)

    def weight_stack(self) -> np.ndarray:
        """phi weights for every block of the range, shape (blocks, *grid.shape)."""
        return np.stack([self.phi_weights(j) for j in self.j_range])

    def residual(self) -> float:
        """max over nonzero lattice frequencies of |sum_j phi(2^-j xi) - 1|."""
        total = self.weight_stack().sum(axis=0)
        nonzero = self.grid.xi_norm > 0
        return float(np.max(np.abs(total[nonzero] - 1.0)))

    def block_of(self, radius: float) -> int:
        """
        The dyadic index j = floor(log2 |xi|), i.e. 2^j <= |xi| < 2^(j+1). Not clamped to [j_min, j_max]: radii
        below 2^j_min map under the lowest block, radii past the lattice map above j_max.
        """
        if not radius > 0:
            raise UsageError(f"block_of needs a positive radius, received {radius}")
        return int(np.floor(np.log2(radius)))


@lru_cache(maxsize=256)
def _phi_table(grid: PeriodicGrid, j: int) -> np.ndarray:
    table = phi(grid.xi_norm * 2.0 ** (-j))
    table.setflags(write=False)
    return table


@lru_cache(maxsize=256)
def _chi_table(grid: PeriodicGrid, j: int) -> np.ndarray:
    table = chi(grid.xi_norm * 2.0 ** (-j))
    table.setflags(write=False)
    return table


@lru_cache(maxsize=64)
def make_partition(grid: PeriodicGrid) -> DyadicPartition:
    """Every block j with phi(2^-j .) nonzero somewhere on the lattice is included."""
    radii = np.unique(grid.xi_norm[grid.xi_norm > 0])
    low = int(np.floor(np.log2(radii.min()))) - BLOCK_SEARCH_MARGIN
    high = int(np.ceil(np.log2(radii.max()))) + BLOCK_SEARCH_MARGIN
    populated = [j for j in range(low, high + 1) if np.any(phi(radii * 2.0 ** (-j)) > 0)]
    partition = DyadicPartition(grid=grid, j_min=min(populated), j_max=max(populated))
    logger.debug(
        f"[Grid] Partition for d={grid.d}, N={grid.N}: j_range=[{partition.j_min}, {partition.j_max}]"
    )
    return partition


def block(u: SpectralField, j: int) -> SpectralField:
    """Delta_j u; a block outside the resolvable range is the zero field, flagged."""
    partition = make_partition(u.grid)
    if j not in partition:
        logger.warning(
            f"[Grid] Block {j} is outside j_range [{partition.j_min}, {partition.j_max}] - returning a zero field"
        )
        return SpectralField(
            u.grid,
            np.zeros_like(u.coeffs),
            mean_zero=True,
            flags=u.flags | {OUTSIDE_RANGE_FLAG},
        )
    return SpectralField(
        u.grid, u.coeffs * partition.phi_weights(j), mean_zero=True, flags=u.flags
    )


def low_cutoff(u: SpectralField, j: int) -> SpectralField:
    """S_j u = chi(2^-j D) u (keeps the zero mode)."""
    return SpectralField(
        u.grid,
        u.coeffs * _chi_table(u.grid, j),
        mean_zero=u.mean_zero,
        flags=u.flags,
    )


@lru_cache(maxsize=64)
def _friedrichs_mask(grid: PeriodicGrid, n: float) -> np.ndarray:
    radius = grid.xi_norm
    mask = (radius >= 1.0 / n) & (radius <= n)
    mask.setflags(write=False)
    return mask


def friedrichs_truncate(u: SpectralField, n: float) -> SpectralField:
    """J_n u: the sharp indicator of 1/n <= |xi| <= n. Always removes the zero mode."""
    if n < 1:
        raise UsageError(f"Friedrichs truncation needs n >= 1, got {n}")
    return SpectralField(
        u.grid, u.coeffs * _friedrichs_mask(u.grid, float(n)), mean_zero=True, flags=u.flags
    )


def block_coefficients(u: SpectralField) -> np.ndarray:
    """All blocks at once, shape (blocks, components, *grid.shape)."""
    weights = make_partition(u.grid).weight_stack()
    return weights[:, np.newaxis] * u.coeffs[np.newaxis]
