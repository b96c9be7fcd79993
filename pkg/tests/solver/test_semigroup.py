import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from swbench.common.errors import UsageError
from swbench.common.random_fields import random_field, single_mode
from swbench.solver.semigroup import (
    LamePropagator,
    coupled_dissipation,
    coupled_linear_flow,
    coupled_mode_exponential,
    divergence_flow,
    duhamel,
    duhamel_trajectory,
    heat_flow,
    lame_flow,
    measure_smoothing_estimate,
    phi_functions,
)
from swbench.spectral.field import hermitian_defect, transform, zeros
from swbench.spectral.grid import PeriodicGrid
from swbench.spectral.operators import differentiate
from swbench.spectral.trajectory import FieldTrajectory


def _vector(grid, first, second):
    return transform(grid, np.stack([first, second]))


def test_heat_flow_should_damp_a_mode_by_its_frequency(grid):
    x0, x1 = grid.coordinates
    u = transform(grid, np.sin(x0 + x1))
    result = heat_flow(u, 0.3, diffusivity=2.0).values
    assert np.max(np.abs(result - math.exp(-1.2) * np.sin(x0 + x1))) <= 1e-13


def test_lame_flow_should_damp_shear_at_rate_one(grid):
    _, x1 = grid.coordinates
    u = _vector(grid, np.sin(x1), np.zeros(grid.shape))
    result = lame_flow(u, 0.5).values
    assert np.max(np.abs(result[0] - math.exp(-0.5) * np.sin(x1))) <= 1e-12


def test_lame_flow_should_damp_compression_at_rate_two(grid):
    x0, _ = grid.coordinates
    u = _vector(grid, np.sin(x0), np.zeros(grid.shape))
    result = lame_flow(u, 0.5).values
    assert np.max(np.abs(result[0] - math.exp(-1.0) * np.sin(x0))) <= 1e-12
    assert np.max(np.abs(result[1])) <= 1e-12


def test_lame_flow_divergence_should_follow_doubled_heat(grid, rng):
    u = random_field(grid, rng, components=2)
    flowed = differentiate(lame_flow(u, 0.2), "divergence")
    assert np.max(np.abs(flowed.coeffs - divergence_flow(u, 0.2).coeffs)) <= 1e-12


def test_lame_flow_should_refuse_scalars_and_backward_time(grid):
    with pytest.raises(UsageError):
        lame_flow(zeros(grid, 1), 1.0)
    with pytest.raises(UsageError):
        lame_flow(zeros(grid, 2), -1.0)


def test_lame_propagator_should_refuse_other_grids(grid):
    propagator = LamePropagator(grid, 0.1)
    with pytest.raises(UsageError):
        propagator(zeros(PeriodicGrid(d=2, N=16), 2))


def test_lame_propagator_should_compose_as_a_semigroup(grid, rng):
    u = random_field(grid, rng, components=2)
    twice = LamePropagator(grid, 0.1)(LamePropagator(grid, 0.2)(u))
    once = LamePropagator(grid, 0.3)(u)
    assert np.max(np.abs(twice.coeffs - once.coeffs)) <= 1e-14


@given(st.floats(min_value=1e-8, max_value=50.0))
def test_phi_functions_should_match_closed_forms(z: float):
    phi1, psi = phi_functions(np.array([z]))
    assert phi1[0] == pytest.approx(-math.expm1(-z) / z, rel=1e-12)
    assert psi[0] == pytest.approx(
        0.5 - z / 3 + z**2 / 8 - z**3 / 30 + z**4 / 144 - z**5 / 840 if z < 1e-2 else (1 - math.exp(-z) * (1 + z)) / z**2,
        rel=1e-10,
    )


def test_phi_functions_at_zero_should_equal_their_limits():
    phi1, psi = phi_functions(np.array([0.0]))
    assert phi1[0] == 1.0
    assert psi[0] == 0.5


def _constant_forcing(grid, field, horizon=1.0, samples=2):
    times = np.linspace(0.0, horizon, samples)
    return FieldTrajectory.from_fields(times, [field] * samples)


def test_duhamel_with_constant_forcing_should_integrate_exactly(grid):
    forcing = _constant_forcing(grid, single_mode(grid, (1, 0), real=False))
    result = duhamel(zeros(grid), forcing, 1.0)
    assert result.coeffs[0, 1, 0] == pytest.approx(1 - math.exp(-1), abs=1e-14)


def test_duhamel_with_linear_forcing_should_integrate_exactly(grid):
    mode = single_mode(grid, (1, 0), real=False)
    times = np.linspace(0.0, 1.0, 3)
    forcing = FieldTrajectory.from_fields(times, [mode * float(t) for t in times])
    result = duhamel(zeros(grid), forcing, 1.0)
    assert result.coeffs[0, 1, 0] == pytest.approx(math.exp(-1), abs=1e-14)


def test_duhamel_should_use_the_potential_rate_for_lame(grid):
    forcing = _constant_forcing(grid, single_mode(grid, (1, 0), real=False, components=2))
    result = duhamel(zeros(grid, 2), forcing, 1.0, operator="lame")
    assert result.coeffs[0, 1, 0] == pytest.approx((1 - math.exp(-2)) / 2, abs=1e-14)


def test_duhamel_without_forcing_should_reduce_to_the_semigroup(grid, rng):
    u0 = random_field(grid, rng, components=2)
    forcing = _constant_forcing(grid, zeros(grid, 2), horizon=0.5)
    result = duhamel(u0, forcing, 0.5, operator="lame")
    assert np.max(np.abs(result.coeffs - lame_flow(u0, 0.5).coeffs)) <= 1e-14
    assert duhamel(u0, forcing, 0.0) is u0


def test_duhamel_should_refuse_forcing_that_does_not_cover_the_interval(grid):
    forcing = _constant_forcing(grid, zeros(grid), horizon=0.5)
    with pytest.raises(UsageError):
        duhamel(zeros(grid), forcing, 1.0)


def test_duhamel_should_refuse_component_mismatch(grid):
    forcing = _constant_forcing(grid, zeros(grid, 2))
    with pytest.raises(UsageError):
        duhamel(zeros(grid), forcing, 1.0)


def test_duhamel_trajectory_should_end_at_the_duhamel_value(grid, rng):
    u0 = random_field(grid, rng)
    times = np.linspace(0.0, 1.0, 9)
    shape = random_field(grid, np.random.default_rng(3))
    forcing = FieldTrajectory.from_fields(times, [shape * math.cos(t) for t in times])
    trajectory = duhamel_trajectory(u0, forcing, diffusivity=0.5)
    final = duhamel(u0, forcing, 1.0, diffusivity=0.5)
    assert np.max(np.abs(trajectory.coeffs[-1] - final.coeffs)) <= 1e-13
    assert np.array_equal(trajectory.coeffs[0], u0.coeffs)


def test_smoothing_estimate_should_refuse_inverted_exponents(grid):
    with pytest.raises(UsageError):
        measure_smoothing_estimate(grid, rho1=1.0, rho2=2.0, samples=1)


def test_smoothing_constant_should_be_finite(grid):
    measured = measure_smoothing_estimate(grid, rho1=math.inf, rho2=1.0, samples=2, steps=16)
    assert 0.0 < measured.value < math.inf


@pytest.mark.integration
def test_smoothing_constant_should_not_depend_on_the_resolution():
    constants = [
        measure_smoothing_estimate(PeriodicGrid(d=2, N=N), rho1=math.inf, rho2=1.0, samples=8, steps=32).value
        for N in (32, 64, 128)
    ]
    assert all(0.0 < c < math.inf for c in constants)
    assert max(constants) / min(constants) <= 1.05


@pytest.mark.parametrize(
    "k, lam, kappa, t",
    [
        (1.0, 1.0, 2.0, 0.7),  # underdamped
        (1.0, 10.0, 0.5, 0.3),  # overdamped
        (1.0, 2.0, 1.0, 1.0),  # critical
        (3.0, 6.0 + 1e-7, 1.0, 0.5),  # near critical
        (20.0, 400.0, 2.0, 0.01),  # stiff
        (0.0, 0.0, 2.0, 1.0),  # zero mode
    ],
)
def test_coupled_mode_exponential_should_match_matrix_exponential(k, lam, kappa, t):
    entries = coupled_mode_exponential(np.array([k]), np.array([lam]), kappa, t)
    expected = expm(t * np.array([[0.0, -k], [kappa * k, -lam]]))
    actual = np.array([[entries[0][0], entries[1][0]], [entries[2][0], entries[3][0]]])
    assert np.max(np.abs(actual - expected)) <= 1e-12 * max(1.0, np.max(np.abs(expected)))


@settings(max_examples=50, deadline=None)
@given(
    st.floats(min_value=0.0, max_value=30.0),
    st.floats(min_value=0.0, max_value=50.0),
    st.floats(min_value=0.01, max_value=10.0),
    st.floats(min_value=0.0, max_value=2.0),
)
def test_coupled_mode_exponential_should_be_accurate_everywhere(k, lam, kappa, t):
    entries = coupled_mode_exponential(np.array([k]), np.array([lam]), kappa, t)
    expected = expm(t * np.array([[0.0, -k], [kappa * k, -lam]]))
    actual = np.array([[entries[0][0], entries[1][0]], [entries[2][0], entries[3][0]]])
    assert np.max(np.abs(actual - expected)) <= 1e-9 * max(1.0, np.max(np.abs(expected)))


@pytest.mark.parametrize("viscosity, lam", [("laplacian", 1.0), ("lame", 2.0)])
def test_coupled_flow_of_a_density_mode_should_match_the_mode_matrix(grid, viscosity, lam):
    q0 = single_mode(grid, (1, 0), amplitude=0.5)
    q, u = coupled_linear_flow(q0, zeros(grid, 2), 0.8, pressure_slope=2.0, viscosity=viscosity)
    expected = expm(0.8 * np.array([[0.0, -1.0], [2.0, -lam]]))
    assert q.coeffs[0, 1, 0] == pytest.approx(0.5 * expected[0, 0], abs=1e-12)
    divergence = differentiate(u, "divergence")
    assert divergence.coeffs[0, 1, 0] == pytest.approx(0.5 * expected[1, 0], abs=1e-12)
    assert hermitian_defect(u) <= 1e-12


def test_coupled_flow_should_heat_the_solenoidal_part(grid):
    _, x1 = grid.coordinates
    u0 = _vector(grid, np.sin(x1), np.zeros(grid.shape))
    q, u = coupled_linear_flow(zeros(grid), u0, 0.4, pressure_slope=2.0, nu=0.5)
    assert q.max_abs_coeff() <= 1e-15
    assert np.max(np.abs(u.values[0] - math.exp(-0.2) * np.sin(x1))) <= 1e-12


def test_coupled_flow_should_preserve_the_density_mean(grid, rng):
    q0 = random_field(grid, rng)
    u0 = random_field(grid, rng, components=2)
    q, _ = coupled_linear_flow(q0, u0, 1.0, pressure_slope=2.0)
    assert abs(q.mean[0]) <= 1e-13


def test_coupled_flow_should_refuse_mismatched_inputs(grid):
    with pytest.raises(UsageError):
        coupled_linear_flow(zeros(grid, 2), zeros(grid, 2), 1.0, pressure_slope=1.0)
    with pytest.raises(UsageError):
        coupled_dissipation(grid, "bulk", 1.0)
