import math

import numpy as np
import pytest

from swbench.analysis.littlewood_paley import block, chi, make_partition
from swbench.analysis.norms import (
    besov_norm,
    block_norms,
    chemin_lerner_norm,
    hybrid_norm,
    lebesgue_besov_norm,
    log_interpolation_check,
    lr_sum,
    time_lebesgue,
)
from swbench.common.errors import UsageError
from swbench.common.random_fields import random_field, random_trajectory, single_mode
from swbench.pydantic_models.indices import BesovIndex, HybridIndex
from swbench.spectral.field import lp_norm_of_values, parseval_l2, zeros
from swbench.spectral.trajectory import FieldTrajectory


def test_lr_sum_should_handle_finite_and_infinite_exponents():
    assert lr_sum(np.array([3.0, -4.0]), 2) == pytest.approx(5.0)
    assert lr_sum(np.array([3.0, -4.0]), math.inf) == 4.0
    assert lr_sum(np.array([]), 1) == 0.0


def test_time_lebesgue_should_use_quadrature_weights():
    values = np.array([[1.0], [3.0]])
    assert time_lebesgue(values, np.array([0.5, 0.5]), 1.0)[0] == pytest.approx(2.0)
    assert time_lebesgue(values, np.array([0.5, 0.5]), math.inf)[0] == 3.0


def test_zero_field_should_have_zero_norm(grid):
    assert besov_norm(zeros(grid, 2), BesovIndex(s=1.0)) == 0.0


def test_single_mode_l2_blocks_should_sum_to_its_l2_norm(grid):
    u = single_mode(grid, (4, 0))
    assert besov_norm(u, BesovIndex(s=0.0, p=2, r=1)) == pytest.approx(parseval_l2(u), rel=1e-12)


def test_single_mode_besov_norm_should_weight_its_two_blocks(grid):
    u = single_mode(grid, (4, 0))
    c = float(chi(np.array([1.0]))[0])
    expected = parseval_l2(u) * (2.0**2 * (1 - c) + 2.0 * c)
    assert besov_norm(u, BesovIndex(s=1.0)) == pytest.approx(expected, rel=1e-12)


def test_block_norms_should_agree_between_parseval_and_quadrature(grid, rng):
    u = random_field(grid, rng)
    partition = make_partition(grid)
    quadrature = [lp_norm_of_values(block(u, j).values, grid, 2.0) for j in partition.j_range]
    assert np.allclose(block_norms(u, 2.0), quadrature, rtol=1e-10)


def test_block_norms_should_be_indexed_by_block(grid, rng):
    u = random_field(grid, rng)
    assert block_norms(u, math.inf).shape == (len(make_partition(grid).j_range),)


def test_besov_norm_should_ignore_the_mean(grid):
    u = single_mode(grid, (0, 0), amplitude=5.0, real=False)
    assert besov_norm(u, BesovIndex(s=0.0)) == 0.0


def test_besov_norm_should_grow_with_regularity(grid, rng):
    u = random_field(grid, rng)
    assert besov_norm(u, BesovIndex(s=2.0)) > besov_norm(u, BesovIndex(s=1.0))


def test_chemin_lerner_norm_should_dominate_lebesgue_besov(grid, rng):
    traj = random_trajectory(grid, rng, np.linspace(0, 1, 9))
    idx = BesovIndex(s=1.0, p=2, r=1, rho=math.inf)
    assert chemin_lerner_norm(traj, idx) >= lebesgue_besov_norm(traj, idx) * (1 - 1e-12)


def test_chemin_lerner_norm_should_match_lebesgue_besov_for_rho_equal_r(grid, rng):
    traj = random_trajectory(grid, rng, np.linspace(0, 1, 9))
    idx = BesovIndex(s=0.5, p=2, r=1, rho=1)
    assert chemin_lerner_norm(traj, idx) == pytest.approx(lebesgue_besov_norm(traj, idx), rel=1e-12)


def test_constant_trajectory_sup_norm_should_equal_besov_norm(grid, rng):
    u = random_field(grid, rng)
    traj = FieldTrajectory.from_fields([0.0, 0.5, 1.0], [u, u, u])
    idx = BesovIndex(s=1.0, p=2, r=1, rho=math.inf)
    assert chemin_lerner_norm(traj, idx) == pytest.approx(besov_norm(u, BesovIndex(s=1.0)), rel=1e-12)


def test_chemin_lerner_norm_should_need_a_time_exponent(grid, rng):
    traj = random_trajectory(grid, rng, np.linspace(0, 1, 3))
    with pytest.raises(UsageError):
        chemin_lerner_norm(traj, BesovIndex(s=1.0))


def test_chemin_lerner_norm_should_need_two_samples(grid, rng):
    traj = FieldTrajectory.from_fields([0.0], [random_field(grid, rng)])
    with pytest.raises(UsageError):
        chemin_lerner_norm(traj, BesovIndex(s=1.0, rho=1))


def test_hybrid_norm_should_reduce_to_besov_norm_at_extreme_thresholds(grid, rng):
    u = random_field(grid, rng)
    partition = make_partition(grid)
    all_high = hybrid_norm(u, HybridIndex(s_low=0.0, s_high=1.0, threshold=partition.j_min))
    all_low = hybrid_norm(u, HybridIndex(s_low=0.0, s_high=1.0, threshold=partition.j_max + 1))
    assert all_high == pytest.approx(besov_norm(u, BesovIndex(s=1.0)), rel=1e-12)
    assert all_low == pytest.approx(besov_norm(u, BesovIndex(s=0.0)), rel=1e-12)


def test_log_interpolation_should_refuse_non_positive_gap(grid, rng):
    traj = random_trajectory(grid, rng, np.linspace(0, 1, 3))
    with pytest.raises(UsageError):
        log_interpolation_check(traj, 1.0, 0.0, 1.0)


def test_log_interpolation_of_zero_trajectory_should_be_zero(grid):
    traj = FieldTrajectory.from_fields([0.0, 1.0], [zeros(grid), zeros(grid)])
    assert log_interpolation_check(traj, 1.0, 0.5, 1.0) == 0.0


def test_log_interpolation_constant_should_be_finite(grid, rng):
    traj = random_trajectory(grid, rng, np.linspace(0, 1, 5))
    constant = log_interpolation_check(traj, 1.0, 0.5, 1.0)
    assert 0.0 < constant < math.inf


def test_besov_index_should_accept_infinity_as_text():
    idx = BesovIndex(s=1.0, p="inf", r="inf", rho=2)
    assert math.isinf(idx.p)
    assert idx.label() == "L~^2 B^1_{inf,inf}"
