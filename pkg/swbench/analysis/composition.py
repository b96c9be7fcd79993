"""
Composition F(u) of a scalar field with a smooth function, evaluated on a 2x padded physical grid.

Padding suppresses but does not remove aliasing for non-polynomial F; composition_aliasing measures the
remaining part against a 4x padded evaluation.
"""

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from loguru import logger

from swbench.analysis.norms import besov_norm
from swbench.common.constants import (
    ALIASING_REFERENCE_PADDING,
    COMPOSITION_PADDING,
    DEFAULT_RANDOM_KMAX,
    DEFAULT_RANDOM_SAMPLES,
)
from swbench.common.errors import UsageError, VacuumError
from swbench.common.random_fields import random_field
from swbench.config import vacuum_threshold
from swbench.pydantic_models.indices import BesovIndex
from swbench.pydantic_models.reports import MeasuredConstant
from swbench.spectral.field import SpectralField, inverse, parseval_l2
from swbench.spectral.grid import PeriodicGrid
from swbench.spectral.operators import from_padded_values, padded_values


@dataclass(frozen=True)
class Nonlinearity:
    """A pointwise function F with F(0) = 0; vacuum_guard marks F singular at u = -1 (functions of 1+u)."""

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    vacuum_guard: bool = False

    def __call__(self, values: np.ndarray) -> np.ndarray:
        return self.func(values)


IDENTITY = Nonlinearity("identity", lambda x: x)
LOG_DENSITY = Nonlinearity("ln(1+.)", np.log1p, vacuum_guard=True)


def check_vacuum(values: np.ndarray, context: str = "") -> float:
    """Minimum of 1+q over the sampled points; raises VacuumError at or below the threshold."""
    minimum = float(np.min(1.0 + values))
    threshold = vacuum_threshold()
    if not minimum > threshold:
        raise VacuumError(minimum, threshold, context)
    return minimum


def compose(
    u: SpectralField, nonlinearity: Nonlinearity, *, padding: int = COMPOSITION_PADDING
) -> SpectralField:
    if not u.is_scalar:
        raise UsageError(f"compose needs a scalar field, got {u.components} components")
    values = padded_values(u, padding).real
    if nonlinearity.vacuum_guard:
        check_vacuum(values, nonlinearity.name)
    return from_padded_values(nonlinearity(values), u.grid).flagged(*u.flags)


def composition_aliasing(u: SpectralField, nonlinearity: Nonlinearity) -> float:
    """Relative L^2 difference between the default padded evaluation and a finer reference."""
    coarse = compose(u, nonlinearity)
    reference = compose(u, nonlinearity, padding=ALIASING_REFERENCE_PADDING)
    scale = parseval_l2(reference)
    if scale == 0.0:
        return 0.0
    return parseval_l2(coarse - reference) / scale


def _scaled_random(
    grid: PeriodicGrid, rng: np.random.Generator, sup_norm: float, kmax: int
) -> SpectralField:
    u = random_field(grid, rng, kmax=kmax)
    peak = float(np.max(np.abs(inverse(u))))
    return u * (sup_norm / peak) if peak > 0 else u


def measure_composition_estimate(
    grid: PeriodicGrid,
    nonlinearity: Nonlinearity,
    *,
    s: float,
    sup_norm: float = 0.5,
    samples: int = DEFAULT_RANDOM_SAMPLES,
    seed: int = 0,
    kmax: int = DEFAULT_RANDOM_KMAX,
) -> MeasuredConstant:
    """max over random u with ||u||_inf = sup_norm of ||F(u)||_{B^s_{2,1}} / ||u||_{B^s_{2,1}}."""
    if s <= 0:
        raise UsageError(f"The composition law requires s > 0 (got s={s})")
    rng = np.random.default_rng(seed)
    idx = BesovIndex(s=s, p=2, r=1)
    worst = 0.0
    for _ in range(samples):
        u = _scaled_random(grid, rng, sup_norm, min(kmax, grid.N // 2 - 1))
        denominator = besov_norm(u, idx)
        if denominator > 0:
            worst = max(worst, besov_norm(compose(u, nonlinearity), idx) / denominator)
    logger.info(
        f"[Verify] composition constant for {nonlinearity.name} in B^{s:g}_(2,1) on N={grid.N}: {worst:.4g}"
    )
    return MeasuredConstant(
        name=f"composition {nonlinearity.name}",
        value=worst,
        samples=samples,
        grid_points=grid.N,
        hypothesis="s > 0, F(0) = 0",
    )


def measure_composition_difference(
    grid: PeriodicGrid,
    nonlinearity: Nonlinearity,
    *,
    s: float | None = None,
    sup_norm: float = 0.5,
    samples: int = DEFAULT_RANDOM_SAMPLES,
    seed: int = 0,
    kmax: int = DEFAULT_RANDOM_KMAX,
) -> MeasuredConstant:
    """max over random pairs of ||F(q1) - F(q2)||_{B^s_{2,1}} / ||q1 - q2||_{B^s_{2,1}}, s = d/2 - 1 by default."""
    s = grid.d / 2 - 1 if s is None else s
    if not -grid.d / 2 < s <= grid.d / 2:
        raise UsageError(f"The difference law requires -d/2 < s <= d/2 (got s={s})")
    rng = np.random.default_rng(seed)
    idx = BesovIndex(s=s, p=2, r=1)
    worst = 0.0
    for _ in range(samples):
        kcap = min(kmax, grid.N // 2 - 1)
        q1 = _scaled_random(grid, rng, sup_norm, kcap)
        q2 = _scaled_random(grid, rng, sup_norm, kcap)
        denominator = besov_norm(q1 - q2, idx)
        if denominator > 0:
            gap = compose(q1, nonlinearity) - compose(q2, nonlinearity)
            worst = max(worst, besov_norm(gap, idx) / denominator)
    logger.info(
        f"[Verify] composition difference constant for {nonlinearity.name} on N={grid.N}: {worst:.4g}"
    )
    return MeasuredConstant(
        name=f"composition difference {nonlinearity.name}",
        value=worst,
        samples=samples,
        grid_points=grid.N,
        hypothesis="-d/2 < s <= d/2",
    )
