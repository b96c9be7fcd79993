"""
Bony decomposition uv = T_u v + T_v u + R(u, v) + (mean u)(mean v) and the empirical product laws.

T_u v = sum_j S_{j-1}u Delta_j v and R(u, v) = sum_j sum_{|j'-j|<=1} Delta_j u Delta_j' v, every product
dealiased. S_{j-1} keeps the zero mode, so for fields with a mean the leftover is the product of the means.
"""

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from loguru import logger

from swbench.analysis.littlewood_paley import block_coefficients, make_partition
from swbench.analysis.norms import besov_norm
from swbench.common.constants import DEFAULT_RANDOM_KMAX, DEFAULT_RANDOM_SAMPLES
from swbench.common.errors import UsageError
from swbench.common.random_fields import random_field
from swbench.pydantic_models.indices import BesovIndex
from swbench.pydantic_models.reports import MeasuredConstant
from swbench.spectral.field import SpectralField, lp_norm
from swbench.spectral.grid import PeriodicGrid
from swbench.spectral.operators import (
    check_product_operands,
    from_padded_values,
    padded_values,
)

ProductLaw = Literal["paraproduct-linf", "paraproduct-negative", "remainder"]


@dataclass(frozen=True, eq=False)
class BonySplit:
    paraproduct_uv: SpectralField
    paraproduct_vu: SpectralField
    remainder: SpectralField
    mean_product: SpectralField
    inputs_mean_zero: tuple[bool, bool]

    def total(self) -> SpectralField:
        return self.paraproduct_uv + self.paraproduct_vu + self.remainder + self.mean_product


def _padded_stack(grid: PeriodicGrid, coeffs: np.ndarray) -> list[np.ndarray]:
    return [padded_values(SpectralField(grid, c)) for c in coeffs]


def _low_cutoff_stack(u: SpectralField) -> np.ndarray:
    """S_{j-1} u for every j in j_range."""
    partition = make_partition(u.grid)
    return np.stack([partition.chi_weights(j - 1) * u.coeffs for j in partition.j_range])


def paraproduct(u: SpectralField, v: SpectralField) -> SpectralField:
    """T_u v."""
    check_product_operands(u, v)
    lows = _padded_stack(u.grid, _low_cutoff_stack(u))
    blocks = _padded_stack(v.grid, block_coefficients(v))
    total = sum(low * blk for low, blk in zip(lows, blocks, strict=True))
    return from_padded_values(total, u.grid)


def remainder(u: SpectralField, v: SpectralField) -> SpectralField:
    """R(u, v)."""
    check_product_operands(u, v)
    blocks_u = _padded_stack(u.grid, block_coefficients(u))
    blocks_v = _padded_stack(v.grid, block_coefficients(v))
    count = len(blocks_u)
    total = 0
    for j in range(count):
        neighbours = sum(blocks_v[k] for k in range(max(j - 1, 0), min(j + 2, count)))
        total = total + blocks_u[j] * neighbours
    return from_padded_values(total, u.grid)


def _mean_product(u: SpectralField, v: SpectralField) -> SpectralField:
    zero = (slice(None),) + (0,) * u.grid.d
    components = max(u.components, v.components)
    coeffs = np.zeros((components,) + u.grid.shape, dtype=np.complex128)
    coeffs[zero] = u.coeffs[zero] * v.coeffs[zero]
    return SpectralField(u.grid, coeffs)


def bony_split(u: SpectralField, v: SpectralField) -> BonySplit:
    check_product_operands(u, v)
    if u.mean_zero != v.mean_zero:
        logger.debug("[Grid] Bony split of one mean-zero and one general field")
    return BonySplit(
        paraproduct_uv=paraproduct(u, v),
        paraproduct_vu=paraproduct(v, u),
        remainder=remainder(u, v),
        mean_product=_mean_product(u, v),
        inputs_mean_zero=(u.mean_zero, v.mean_zero),
    )


def _check_law_hypotheses(law: ProductLaw, t: float | None, s1: float | None, s2: float | None) -> None:
    match law:
        case "paraproduct-linf":
            return
        case "paraproduct-negative":
            if t is None or not t < 0:
                raise UsageError(f"paraproduct-negative law requires t < 0 (got t={t})")
        case "remainder":
            if s1 is None or s2 is None or not s1 + s2 > 0:
                raise UsageError(f"remainder law requires s1 + s2 > 0 (got s1={s1}, s2={s2})")
        case _:
            raise UsageError(f"Unknown product law {law}")


def product_ratio(
    u: SpectralField,
    v: SpectralField,
    law: ProductLaw,
    *,
    s: float = 1.0,
    t: float | None = None,
    s1: float | None = None,
    s2: float | None = None,
) -> float:
    """lhs / rhs of one instance of a product law; 0 when both sides vanish."""
    _check_law_hypotheses(law, t, s1, s2)
    d = u.grid.d
    match law:
        case "paraproduct-linf":
            lhs = besov_norm(paraproduct(u, v), BesovIndex(s=s, p=2, r=1))
            rhs = lp_norm(u, math.inf) * besov_norm(v, BesovIndex(s=s, p=2, r=1))
        case "paraproduct-negative":
            lhs = besov_norm(paraproduct(u, v), BesovIndex(s=s + t, p=2, r=1))
            rhs = besov_norm(u, BesovIndex(s=t, p=math.inf, r=math.inf)) * besov_norm(
                v, BesovIndex(s=s, p=2, r=1)
            )
        case "remainder":
            lhs = besov_norm(remainder(u, v), BesovIndex(s=s1 + s2 - d / 2, p=2, r=1))
            rhs = besov_norm(u, BesovIndex(s=s1, p=2, r=2)) * besov_norm(
                v, BesovIndex(s=s2, p=2, r=2)
            )
    if lhs == 0.0:
        return 0.0
    return lhs / rhs if rhs > 0 else math.inf


def measure_product_estimates(
    grid: PeriodicGrid,
    law: ProductLaw,
    *,
    s: float = 1.0,
    t: float | None = None,
    s1: float | None = None,
    s2: float | None = None,
    samples: int = DEFAULT_RANDOM_SAMPLES,
    seed: int = 0,
    kmax: int = DEFAULT_RANDOM_KMAX,
) -> MeasuredConstant:
    """Empirical constant of a product law: the maximum of lhs / rhs over random pairs."""
    _check_law_hypotheses(law, t, s1, s2)
    rng = np.random.default_rng(seed)
    kmax = min(kmax, grid.N // 2 - 1)
    worst = 0.0
    for _ in range(samples):
        u = random_field(grid, rng, kmax=kmax)
        v = random_field(grid, rng, kmax=kmax)
        worst = max(worst, product_ratio(u, v, law, s=s, t=t, s1=s1, s2=s2))
    hypothesis = {
        "paraproduct-linf": None,
        "paraproduct-negative": "t < 0",
        "remainder": "s1 + s2 > 0",
    }[law]
    logger.info(f"[Verify] {law} constant on N={grid.N}: {worst:.4g} over {samples} samples")
    return MeasuredConstant(
        name=law, value=worst, samples=samples, grid_points=grid.N, hypothesis=hypothesis
    )
