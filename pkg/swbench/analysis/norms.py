"""
Besov, Chemin-Lerner and hybrid Besov norms on the resolvable blocks of a grid.

Block L^p norms are quadratures over the torus: L^2 via the discrete Parseval identity (which equals the
rectangle rule exactly), other p by inverse-transforming each block. The zero mode never enters a block.
"""

import math

import numpy as np
from loguru import logger
from scipy import fft

from swbench.analysis.littlewood_paley import block_coefficients, make_partition
from swbench.common.errors import UsageError
from swbench.pydantic_models.indices import BesovIndex, HybridIndex
from swbench.spectral.field import SpectralField, lp_norm_of_values
from swbench.spectral.grid import PeriodicGrid
from swbench.spectral.trajectory import FieldTrajectory


def lr_sum(values: np.ndarray, r: float) -> float:
    values = np.abs(np.asarray(values, dtype=float))
    if values.size == 0:
        return 0.0
    if math.isinf(r):
        return float(values.max())
    return float(np.sum(values**r) ** (1.0 / r))


def time_lebesgue(values: np.ndarray, weights: np.ndarray, rho: float) -> np.ndarray:
    """L^rho over the sample axis (axis 0) with quadrature weights; rho = inf is the max."""
    values = np.abs(np.asarray(values, dtype=float))
    if math.isinf(rho):
        return values.max(axis=0)
    w = np.asarray(weights, dtype=float).reshape((-1,) + (1,) * (values.ndim - 1))
    return np.sum(w * values**rho, axis=0) ** (1.0 / rho)


def block_norms(u: SpectralField, p: float = 2.0) -> np.ndarray:
    """||Delta_j u||_{L^p} for every j in j_range, as an array indexed by j - j_min."""
    grid = u.grid
    partition = make_partition(grid)
    if p == 2.0:
        power = np.sum(np.abs(u.coeffs) ** 2, axis=0)
        weights_sq = partition.weight_stack() ** 2
        energies = np.tensordot(weights_sq, power, axes=grid.d)
        return np.sqrt(grid.volume * energies)
    blocks = block_coefficients(u)
    values = fft.ifftn(blocks, axes=tuple(range(2, grid.d + 2)), norm="forward")
    return np.array([lp_norm_of_values(v, grid, p) for v in values])


def dyadic_weights(grid: PeriodicGrid, s: float) -> np.ndarray:
    partition = make_partition(grid)
    return 2.0 ** (s * np.arange(partition.j_min, partition.j_max + 1, dtype=float))


def besov_norm(u: SpectralField, idx: BesovIndex) -> float:
    """l^r over j of 2^{js} ||Delta_j u||_{L^p}."""
    if not u.mean_zero and np.any(u.mean != 0):
        logger.debug(
            f"[Grid] Zero mode {u.mean} excluded from the {idx.label()} norm"
        )
    return lr_sum(dyadic_weights(u.grid, idx.s) * block_norms(u, idx.p), idx.r)


def trajectory_block_norms(traj: FieldTrajectory, p: float = 2.0) -> np.ndarray:
    """Block norms per sample, shape (samples, blocks)."""
    return np.stack([block_norms(f, p) for f in traj.fields()])


def _require_samples(traj: FieldTrajectory) -> None:
    if len(traj) < 2:
        raise UsageError("Time norms need a trajectory with at least two samples")


def _require_time_exponent(idx: BesovIndex) -> float:
    if idx.rho is None:
        raise UsageError(f"{idx.label()} carries no time exponent rho")
    return idx.rho


def chemin_lerner_norm(traj: FieldTrajectory, idx: BesovIndex) -> float:
    """l^r over j of 2^{js} ||Delta_j u||_{L^rho_T L^p}: time integrability taken per block."""
    _require_samples(traj)
    rho = _require_time_exponent(idx)
    per_block = time_lebesgue(trajectory_block_norms(traj, idx.p), traj.weights, rho)
    return lr_sum(dyadic_weights(traj.grid, idx.s) * per_block, idx.r)


def lebesgue_besov_norm(traj: FieldTrajectory, idx: BesovIndex) -> float:
    """|| ||u(t)||_{B^s_{p,r}} ||_{L^rho_T}: the Besov norm first, then time."""
    _require_samples(traj)
    rho = _require_time_exponent(idx)
    weights = dyadic_weights(traj.grid, idx.s)
    per_time = np.array(
        [lr_sum(weights * row, idx.r) for row in trajectory_block_norms(traj, idx.p)]
    )
    return float(time_lebesgue(per_time, traj.weights, rho))


def hybrid_norm(u: SpectralField, idx: HybridIndex) -> float:
    partition = make_partition(u.grid)
    js = np.arange(partition.j_min, partition.j_max + 1, dtype=float)
    exponents = np.where(js < idx.threshold, idx.s_low, idx.s_high)
    return float(np.sum(2.0 ** (exponents * js) * block_norms(u, 2.0)))


def log_interpolation_check(
    traj: FieldTrajectory, s: float, eps: float, rho: float, p: float = 2.0
) -> float:
    """
    Smallest C with
        ||u||_{L~^rho B^s_{p,1}} <= C (1+eps)/eps ||u||_{L~^rho B^s_{p,inf}}
                                   log(e + (||u||_{L~^rho B^{s-eps}_{p,inf}} + ||u||_{L~^rho B^{s+eps}_{p,inf}}) / ||u||_{L~^rho B^s_{p,inf}})
    for this trajectory.
    """
    if eps <= 0:
        raise UsageError(f"The interpolation gap eps must be positive, got {eps}")
    lhs = chemin_lerner_norm(traj, BesovIndex(s=s, p=p, r=1.0, rho=rho))
    if lhs == 0.0:
        return 0.0
    center = chemin_lerner_norm(traj, BesovIndex(s=s, p=p, r=math.inf, rho=rho))
    below = chemin_lerner_norm(traj, BesovIndex(s=s - eps, p=p, r=math.inf, rho=rho))
    above = chemin_lerner_norm(traj, BesovIndex(s=s + eps, p=p, r=math.inf, rho=rho))
    rhs = (1 + eps) / eps * center * math.log(math.e + (below + above) / center)
    return lhs / rhs
