"""
Difference norms between two runs sharing a grid and sample times.

d >= 3 measures beta_delta = ||du||_{L~^inf_t B^{d/2-2}_{2,1}} + ||du||_{L^1_t B^{d/2}_{2,1}}. In d <= 2 the third
index drops to inf and the logarithmic modulus r log(e + W/r) is evaluated alongside, with
W = sum_i ||u_bar_i||_{L^1_t B^{d/2-1}_{2,inf}} + ||u_bar_i||_{L^1_t B^{d/2+1}_{2,inf}}.
"""

import math

import numpy as np
from loguru import logger
from scipy.integrate import cumulative_trapezoid

from swbench.analysis.norms import dyadic_weights, log_interpolation_check, lr_sum, trajectory_block_norms
from swbench.common.errors import UsageError
from swbench.diagnostics.ledger import EstimateLedger
from swbench.pydantic_models.diagnostics import GapReport, GapRow
from swbench.solver.state import Trajectory
from swbench.spectral.grid import PeriodicGrid

# Relative u_L difference above which the pair is flagged as not sharing a linear part.
_LINEAR_MISMATCH_TOLERANCE = 1e-12


def osgood_modulus(r: float | np.ndarray, W: float | np.ndarray) -> np.ndarray:
    """r log(e + W/r), continued by 0 at r = 0; written as r (log(W + e r) - log r) so tiny r cannot overflow."""
    r = np.asarray(r, dtype=float)
    W = np.broadcast_to(np.asarray(W, dtype=float), r.shape)
    out = np.zeros_like(r)
    positive = r > 0
    rp, Wp = r[positive], W[positive]
    out[positive] = rp * (np.log(Wp + math.e * rp) - np.log(rp))
    return out


def _weighted_sums(grid: PeriodicGrid, blocks: np.ndarray, s: float, r: float) -> np.ndarray:
    """Per-sample l^r sums of 2^{js} blocks; blocks has shape (samples, blocks)."""
    weighted = dyadic_weights(grid, s) * blocks
    return np.array([lr_sum(row, r) for row in weighted])


def _running(blocks: np.ndarray, times: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Running per-block maxima and trapezoid integrals along the sample axis."""
    return np.maximum.accumulate(blocks, axis=0), cumulative_trapezoid(blocks, times, axis=0, initial=0)


def _linear_mismatch(run1: Trajectory, run2: Trajectory) -> bool:
    scale = max(np.abs(run1.initial.u_lin.coeffs).max(), 1e-300)
    worst = max(
        np.abs(a.u_lin.coeffs - b.u_lin.coeffs).max() for a, b in zip(run1.states, run2.states)
    )
    return bool(worst > _LINEAR_MISMATCH_TOLERANCE * scale)


def uniqueness_gap(run1: Trajectory, run2: Trajectory) -> GapReport:
    grid = run1.grid
    if run2.grid != grid:
        raise UsageError("Runs live on different grids")
    times = run1.times
    if len(run2) != len(run1) or not np.allclose(run2.times, times, rtol=1e-12, atol=1e-15):
        raise UsageError(
            f"Runs must share their sample times ({len(run1)} vs {len(run2)} samples)"
        )
    d = grid.d
    route = "b21" if d >= 3 else "b2inf-osgood"
    r_route = 1.0 if d >= 3 else math.inf
    notes = list(grid.notes())
    mismatch = _linear_mismatch(run1, run2)
    if mismatch:
        notes.append("runs do not share u_L: gaps include the linear-part difference")
        logger.warning("[Uniqueness] The two runs carry different linear parts u_L")

    dq_blocks = trajectory_block_norms(run1.field("q") - run2.field("q"))
    du_blocks = trajectory_block_norms(run1.field("u_bar") - run2.field("u_bar"))
    dq_max, _ = _running(dq_blocks, times)
    du_max, du_int = _running(du_blocks, times)

    dq_linf = _weighted_sums(grid, dq_max, d / 2 - 1, 1)
    dq_now = _weighted_sums(grid, dq_blocks, d / 2 - 1, 1)
    du_linf = _weighted_sums(grid, du_max, d / 2 - 2, r_route)
    du_l1 = _weighted_sums(grid, du_int, d / 2, r_route)
    du_l1_b21 = _weighted_sums(grid, du_int, d / 2, 1)
    beta_delta = du_linf + du_l1

    W = np.zeros_like(times)
    for run in (run1, run2):
        _, ubar_int = _running(trajectory_block_norms(run.field("u_bar")), times)
        W += _weighted_sums(grid, ubar_int, d / 2 - 1, math.inf)
        W += _weighted_sums(grid, ubar_int, d / 2 + 1, math.inf)
    modulus = osgood_modulus(beta_delta, W[-1])

    V = EstimateLedger.from_trajectory(run1).column("V") + EstimateLedger.from_trajectory(run2).column("V")

    rows = [
        GapRow(
            time=float(times[i]),
            dq_linf=float(dq_linf[i]),
            du_linf=float(du_linf[i]),
            du_l1=float(du_l1[i]),
            du_l1_b21=float(du_l1_b21[i]),
            beta_delta=float(beta_delta[i]),
            osgood_modulus=float(modulus[i]),
            V=float(V[i]),
        )
        for i in range(times.size)
    ]

    # Smallest K with ||dq||_{L~^inf_t} <= K (||dq(0)|| + ||du||_{L^1_t B^{d/2}_{2,1}}); reduces to the
    # classical form when the densities start equal.
    forcing = dq_now[0] + du_l1_b21
    gronwall = 0.0
    for lhs, rhs in zip(dq_linf[1:], forcing[1:]):
        if lhs > 0:
            gronwall = max(gronwall, lhs / rhs if rhs > 0 else math.inf)

    interpolation = 0.0
    if len(times) >= 2 and du_l1_b21[-1] > 0:
        interpolation = log_interpolation_check(
            run1.field("u_bar") - run2.field("u_bar"), d / 2, 1.0, 1.0
        )

    growth = None
    if dq_now[0] > 0 and dq_now[-1] > 0 and V[-1] > 0:
        growth = math.log(dq_now[-1] / dq_now[0]) / V[-1]

    report = GapReport(
        route=route,
        rows=rows,
        gronwall_factor=gronwall,
        interpolation_constant=interpolation,
        growth_exponent=growth,
        linear_part_mismatch=mismatch,
        notes=notes,
    )
    logger.info(
        f"[Uniqueness] T={times[-1]:.4g}: ||dq||={dq_linf[-1]:.3e}, beta_delta={beta_delta[-1]:.3e}, "
        f"Gronwall factor {gronwall:.3e} ({route})"
    )
    return report
