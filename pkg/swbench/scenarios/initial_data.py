"""
Initial-data families.

    trigonometric   low modes with prescribed amplitudes: q0 = a_q sum_m cos(k_m . x), u0_i = a_u sum_m sin(k_{m+i} . x)
    multiscale      random data assembled block by block with weights 2^{-js} eps_j, eps_j = 2^{-decay (j - j_min)},
                    then rescaled so ||q0||_{B^{d/2}_{2,1}} and ||u0||_{B^{d/2-1}_{2,2}} hit their targets
    near-vacuum     q0 = -(1 - rho_min) cos(k_1 . x), reaching min(1+q0) = rho_min on the grid; flagged
"""

from dataclasses import dataclass

import numpy as np
from loguru import logger

from swbench.analysis.composition import check_vacuum
from swbench.analysis.littlewood_paley import block, make_partition
from swbench.analysis.norms import besov_norm
from swbench.common.constants import NEAR_VACUUM_DENSITY
from swbench.common.errors import UsageError
from swbench.common.random_fields import random_field, single_mode
from swbench.pydantic_models.diagnostics import HypothesisNorms
from swbench.pydantic_models.indices import BesovIndex
from swbench.pydantic_models.scenario import InitialDataSection
from swbench.spectral.field import SpectralField, inverse, parseval_l2, zeros
from swbench.spectral.grid import PeriodicGrid
from swbench.spectral.operators import differentiate

NEAR_VACUUM_FLAG = "near-vacuum"


@dataclass(frozen=True, eq=False)
class InitialData:
    q0: SpectralField
    u0: SpectralField
    norms: HypothesisNorms
    flags: frozenset[str]

    @property
    def out_of_hypothesis(self) -> bool:
        return NEAR_VACUUM_FLAG in self.flags


def hypothesis_norms(q0: SpectralField, u0: SpectralField) -> HypothesisNorms:
    d = q0.grid.d
    return HypothesisNorms(
        u0_b22=besov_norm(u0, BesovIndex(s=d / 2 - 1, p=2, r=2)),
        u0_binf=besov_norm(u0, BesovIndex(s=-1.0, p=np.inf, r=1)),
        div_u0=besov_norm(differentiate(u0, "divergence"), BesovIndex(s=d / 2 - 2, p=2, r=1)),
        q0_low=besov_norm(q0, BesovIndex(s=d / 2 - 1, p=2, r=1)),
        q0_high=besov_norm(q0, BesovIndex(s=d / 2, p=2, r=1)),
        min_density=float(np.min(1.0 + inverse(q0))),
    )


def _modes(grid: PeriodicGrid, modes: list[list[int]] | None) -> list[tuple[int, ...]]:
    if modes:
        return [tuple(m) for m in modes]
    return [tuple(int(i == axis) for i in range(grid.d)) for axis in range(grid.d)]


def _trigonometric_velocity(grid: PeriodicGrid, modes: list[tuple[int, ...]], amplitude: float) -> SpectralField:
    u0 = zeros(grid, grid.d)
    if amplitude == 0:
        return u0
    for i in range(grid.d):
        for m in range(len(modes)):
            k = modes[(m + i) % len(modes)]
            u0 = u0 + single_mode(grid, k, amplitude=-0.5j * amplitude, components=grid.d, component=i)
    return u0


def _trigonometric_density(grid: PeriodicGrid, modes: list[tuple[int, ...]], amplitude: float) -> SpectralField:
    q0 = zeros(grid)
    for k in modes:
        q0 = q0 + single_mode(grid, k, amplitude=0.5 * amplitude)
    return q0


def multiscale_field(
    grid: PeriodicGrid,
    rng: np.random.Generator,
    index: BesovIndex,
    target: float,
    *,
    components: int = 1,
    decay: float = 1.0,
    kmax: int = 8,
) -> SpectralField:
    """Random field whose block j carries L^2 mass 2^{-js} eps_j before the global rescaling to `target`."""
    kmax = min(kmax, grid.N // 2 - 1)
    source = random_field(grid, rng, components=components, kmax=kmax)
    partition = make_partition(grid)
    coeffs = np.zeros_like(source.coeffs)
    for j in partition.j_range:
        piece = block(source, j)
        mass = parseval_l2(piece)
        if mass == 0:
            continue
        eps = 2.0 ** (-decay * (j - partition.j_min))
        coeffs += (2.0 ** (-j * index.s) * eps / mass) * piece.coeffs
    field = SpectralField(grid, coeffs, mean_zero=True)
    norm = besov_norm(field, index)
    if target == 0 or norm == 0:
        return zeros(grid, components)
    return field * (target / norm)


def initial_data(params: InitialDataSection, grid: PeriodicGrid) -> InitialData:
    """Builds (q0, u0) for a family and reports every hypothesis norm; a vacuum at t = 0 raises VacuumError."""
    d = grid.d
    modes = _modes(grid, params.modes)
    flags: set[str] = set()
    match params.family:
        case "trigonometric":
            q0 = _trigonometric_density(grid, modes, params.q_amplitude)
            u0 = _trigonometric_velocity(grid, modes, params.u_amplitude)
        case "multiscale":
            rng = np.random.default_rng(params.seed)
            q0 = multiscale_field(
                grid, rng, BesovIndex(s=d / 2, p=2, r=1), params.q_target,
                decay=params.decay, kmax=params.kmax,
            )
            u0 = multiscale_field(
                grid, rng, BesovIndex(s=d / 2 - 1, p=2, r=2), params.u_target,
                components=d, decay=params.decay, kmax=params.kmax,
            )
        case "near-vacuum":
            q0 = single_mode(grid, modes[0], amplitude=-0.5 * (1 - params.min_density))
            u0 = _trigonometric_velocity(grid, modes, params.u_amplitude)
        case _:
            raise UsageError(f"Unknown initial-data family {params.family}")

    check_vacuum(inverse(q0), f"{params.family} initial data")
    norms = hypothesis_norms(q0, u0)
    if params.family == "near-vacuum" or norms.min_density < NEAR_VACUUM_DENSITY:
        flags.add(NEAR_VACUUM_FLAG)
        logger.warning(
            f"[Scenario] min(1+q0)={norms.min_density:.3e}: near-vacuum data, outside the small-data hypotheses"
        )
    logger.info(
        f"[Scenario] {params.family} data: ||q0||_B(d/2)={norms.q0_high:.4e}, ||u0||_B(d/2-1,2,2)={norms.u0_b22:.4e}, "
        f"E0={norms.global_smallness:.4e}"
    )
    return InitialData(
        q0=q0.flagged(*flags),
        u0=u0,
        norms=norms,
        flags=frozenset(flags),
    )
