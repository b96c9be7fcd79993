"""
Per-frequency decay of the linearized density-velocity pair.

For each |xi| the 2x2 propagator exp(tM) of the compressible mode is formed and its decay rate read off as
-log(spectral radius) / t. With nu = 1 and the Laplacian viscosity the rate is |xi|^2 / 2 below the regime
boundary |xi| = 2 sqrt(P'(1)) and tends to P'(1) above it.
"""

import math

import numpy as np
from loguru import logger

from swbench.analysis.littlewood_paley import make_partition
from swbench.analysis.norms import hybrid_norm
from swbench.common.constants import (
    DAMPING_HIGH_BAND,
    DAMPING_LOW_BAND,
    DAMPING_RATE_TIME,
    DAMPING_SWEEP_POINTS,
    DAMPING_SWEEP_RANGE,
    DEFAULT_RANDOM_KMAX,
)
from swbench.common.errors import UsageError
from swbench.common.random_fields import random_field
from swbench.pydantic_models.diagnostics import DampingReport, DampingRow
from swbench.pydantic_models.indices import HybridIndex
from swbench.solver.semigroup import CoupledViscosity, coupled_linear_flow, coupled_mode_exponential
from swbench.spectral.grid import PeriodicGrid


def mode_dissipation(frequency: np.ndarray, viscosity: CoupledViscosity, nu: float) -> np.ndarray:
    match viscosity:
        case "laplacian":
            return nu * frequency**2
        case "lame":
            return 2 * nu * frequency**2
        case _:
            raise UsageError(f"Unknown viscosity {viscosity}")


def decay_rates(
    frequency: np.ndarray,
    pressure_slope: float,
    *,
    viscosity: CoupledViscosity = "laplacian",
    nu: float = 1.0,
    t: float = DAMPING_RATE_TIME,
) -> np.ndarray:
    """-log(spectral radius of exp(tM)) / t per frequency."""
    if t <= 0:
        raise UsageError(f"Rates are read off at a positive time, got {t}")
    k = np.asarray(frequency, dtype=float)
    e00, e01, e10, e11 = coupled_mode_exponential(
        k, mode_dissipation(k, viscosity, nu), pressure_slope, t
    )
    propagators = np.stack([np.stack([e00, e01], -1), np.stack([e10, e11], -1)], -2)
    radius = np.abs(np.linalg.eigvals(propagators)).max(axis=-1)
    with np.errstate(divide="ignore"):
        return -np.log(radius) / t


def hybrid_decay(
    grid: PeriodicGrid,
    pressure_slope: float,
    threshold: int,
    *,
    viscosity: CoupledViscosity = "laplacian",
    nu: float = 1.0,
    horizon: float = 2.0,
    samples: int = 9,
    seed: int = 0,
    kmax: int = DEFAULT_RANDOM_KMAX,
) -> list[tuple[float, float]]:
    """||q(t)||_{B~^{d/2-1,d/2}} for random mean-zero data under the coupled linear flow."""
    rng = np.random.default_rng(seed)
    kmax = min(kmax, grid.N // 2 - 1)
    q0 = random_field(grid, rng, kmax=kmax)
    u0 = random_field(grid, rng, components=grid.d, kmax=kmax)
    index = HybridIndex(s_low=grid.d / 2 - 1, s_high=grid.d / 2, threshold=threshold)
    table = []
    for t in np.linspace(0.0, horizon, samples):
        q, _ = coupled_linear_flow(
            q0, u0, float(t), pressure_slope=pressure_slope, viscosity=viscosity, nu=nu
        )
        table.append((float(t), hybrid_norm(q, index)))
    return table


def damping_report(
    pressure_slope: float,
    *,
    viscosity: CoupledViscosity = "laplacian",
    nu: float = 1.0,
    frequencies: np.ndarray | None = None,
    grid: PeriodicGrid | None = None,
    seed: int = 0,
) -> DampingReport:
    if frequencies is None:
        frequencies = np.geomspace(*DAMPING_SWEEP_RANGE, DAMPING_SWEEP_POINTS)
    frequencies = np.sort(np.asarray(frequencies, dtype=float))
    if np.any(frequencies <= 0):
        raise UsageError("Damping frequencies must be positive")
    rates = decay_rates(frequencies, pressure_slope, viscosity=viscosity, nu=nu)
    notes = []

    degenerate = pressure_slope <= 0
    if degenerate:
        notes.append(f"P'(1)={pressure_slope:g} <= 0: no high-frequency damping of the density")
        logger.warning(f"[Damping] Degenerate pressure slope {pressure_slope:g}")
        boundary = None
    else:
        boundary = float(frequencies[int(np.argmax(rates))])

    low = frequencies <= DAMPING_LOW_BAND
    low_exponent = None
    if np.count_nonzero(low) >= 2 and np.all(rates[low] > 0):
        low_exponent = float(np.polyfit(np.log(frequencies[low]), np.log(rates[low]), 1)[0])

    high = frequencies >= DAMPING_HIGH_BAND
    high_rate = spread = None
    if np.any(high):
        high_rate = float(np.mean(rates[high]))
        if high_rate != 0:
            spread = float((rates[high].max() - rates[high].min()) / abs(high_rate))

    rows = [
        DampingRow(
            frequency=float(k),
            rate=float(rate),
            regime="high" if boundary is not None and k >= boundary else "low",
        )
        for k, rate in zip(frequencies, rates)
    ]

    decay: list[tuple[float, float]] = []
    if grid is not None:
        partition = make_partition(grid)
        threshold = partition.j_max if boundary is None else partition.block_of(boundary)
        decay = hybrid_decay(
            grid, pressure_slope, threshold, viscosity=viscosity, nu=nu, seed=seed
        )

    report = DampingReport(
        pressure_slope=pressure_slope,
        viscosity=viscosity,
        rows=rows,
        boundary=boundary,
        low_frequency_exponent=low_exponent,
        high_frequency_rate=high_rate,
        high_frequency_spread=spread,
        hybrid_decay=decay,
        degenerate=degenerate,
        notes=notes,
    )
    logger.info(
        f"[Damping] P'(1)={pressure_slope:g}: boundary {boundary}, low-frequency exponent {low_exponent}, "
        f"high-frequency rate {high_rate} (spread {spread})"
    )
    return report


def expected_boundary(pressure_slope: float, viscosity: CoupledViscosity = "laplacian", nu: float = 1.0) -> float:
    """|xi| at which the eigenvalues of M meet: lam(|xi|)^2 = 4 P'(1) |xi|^2."""
    if pressure_slope <= 0:
        return math.nan
    factor = 1.0 if viscosity == "laplacian" else 2.0
    return 2 * math.sqrt(pressure_slope) / (factor * nu)
