import numpy as np
import pytest
from scipy.fft import fftshift, ifftshift
from scipy.signal import convolve2d

from swbench.analysis.composition import LOG_DENSITY, compose
from swbench.analysis.littlewood_paley import friedrichs_truncate
from swbench.common.errors import BlowUpError, StepSizeError, UsageError, VacuumError
from swbench.common.random_fields import random_field, single_mode
from swbench.config import ConfigSingleton
from swbench.solver import friedrichs
from swbench.solver.friedrichs import FriedrichsSolver
from swbench.solver.pressure import PressureLaw
from swbench.solver.semigroup import lame_flow
from swbench.solver.state import FlowTerms, Schedule
from swbench.spectral.field import SpectralField, zeros
from swbench.spectral.operators import differentiate


@pytest.fixture
def small_data(grid, rng):
    q0 = random_field(grid, rng, kmax=4, decay=2.0, amplitude=0.02)
    u0 = random_field(grid, rng, components=2, kmax=4, decay=2.0, amplitude=0.02)
    return q0, u0


def test_solver_should_refuse_truncation_below_one(grid):
    with pytest.raises(UsageError):
        FriedrichsSolver(grid, 0.5)


def test_equilibrium_should_stay_at_rest(grid):
    solver = FriedrichsSolver(grid, 8)
    trajectory = solver.run(zeros(grid), zeros(grid, 2), 0.1, Schedule(dt=0.02))
    assert trajectory.completed
    assert trajectory.final.q.max_abs_coeff() == 0.0
    assert trajectory.final.u.max_abs_coeff() == 0.0


def test_linear_only_run_should_follow_the_lame_semigroup(grid, small_data):
    q0, u0 = small_data
    solver = FriedrichsSolver(grid, 8, terms=FlowTerms.linear_only())
    trajectory = solver.run(q0, u0, 0.2, Schedule(dt=0.05))
    final = trajectory.final
    expected = lame_flow(friedrichs_truncate(u0, 8), 0.2)
    assert np.max(np.abs(final.u.coeffs - expected.coeffs)) <= 1e-14
    assert np.array_equal(final.q.coeffs, friedrichs_truncate(q0, 8).coeffs)
    assert final.u_bar.max_abs_coeff() == 0.0


def test_run_should_keep_the_invariants_of_the_truncated_system(grid, small_data):
    q0, u0 = small_data
    solver = FriedrichsSolver(grid, 6)
    trajectory = solver.run(q0, u0, 0.2, Schedule(sample_interval=0.05))
    assert trajectory.completed
    assert trajectory.times.tolist() == pytest.approx([0.0, 0.05, 0.1, 0.15, 0.2])
    for state in trajectory.states:
        assert abs(state.density_mean()) <= 1e-13
        assert state.split_residual() <= 1e-12
        assert state.min_density() > 0.9
    outside = (grid.xi_norm > 6) | (grid.xi_norm < 1 / 6)
    assert np.all(trajectory.final.q.coeffs[0][outside] == 0.0)


def test_run_should_call_sample_hooks_once_per_sample(grid, small_data):
    q0, u0 = small_data
    seen = []
    trajectory = FriedrichsSolver(grid, 4).run(
        q0, u0, 0.1, Schedule(sample_interval=0.025), on_sample=(seen.append,)
    )
    assert len(seen) == len(trajectory) == 5
    assert seen[-1] is trajectory.final


def test_run_without_sample_interval_should_record_every_step(grid, small_data):
    q0, u0 = small_data
    trajectory = FriedrichsSolver(grid, 4).run(q0, u0, 0.1, Schedule(dt=0.02))
    assert len(trajectory) == trajectory.steps + 1 == 6


def test_run_should_refuse_non_positive_horizons(grid, small_data):
    with pytest.raises(UsageError):
        FriedrichsSolver(grid, 4).run(*small_data, 0.0)


def test_step_should_refuse_steps_above_the_advective_bound(grid, small_data):
    solver = FriedrichsSolver(grid, 4)
    state = solver.initial_state(*small_data)
    with pytest.raises(StepSizeError):
        solver.step(state, 2 * solver.dt_max(state))
    with pytest.raises(StepSizeError):
        solver.step(state, 0.0)


def test_initial_state_should_refuse_vacuum(grid):
    q0 = single_mode(grid, (1, 0), amplitude=0.5)
    with pytest.raises(VacuumError):
        FriedrichsSolver(grid, 4).initial_state(q0, zeros(grid, 2))


def test_initial_state_should_refuse_fields_on_other_grids(grid, grid64):
    with pytest.raises(UsageError):
        FriedrichsSolver(grid, 4).initial_state(zeros(grid64), zeros(grid64, 2))


def test_survey_run_should_record_a_blowup(grid, small_data, monkeypatch):
    monkeypatch.setattr(friedrichs, "BLOWUP_VELOCITY_BOUND", 1e-9)
    trajectory = FriedrichsSolver(grid, 4).run(*small_data, 0.1, Schedule(dt=0.02), survey=True)
    assert not trajectory.completed
    assert trajectory.blowup.reason == "velocity-bound"
    assert len(trajectory) == 1


def test_blowup_should_propagate_outside_survey_mode(grid, small_data, monkeypatch):
    monkeypatch.setattr(friedrichs, "BLOWUP_VELOCITY_BOUND", 1e-9)
    with pytest.raises(BlowUpError) as info:
        FriedrichsSolver(grid, 4).run(*small_data, 0.1, Schedule(dt=0.02), survey=False)
    assert info.value.report.step == 1


def test_survey_toggle_should_decide_when_not_given(grid, small_data, monkeypatch):
    monkeypatch.setattr(friedrichs, "BLOWUP_VELOCITY_BOUND", 1e-9)
    ConfigSingleton.init(toggles={"survey-mode": True})
    trajectory = FriedrichsSolver(grid, 4).run(*small_data, 0.1, Schedule(dt=0.02))
    assert trajectory.blowup is not None


def test_transport_step_should_be_nearly_reversible(grid, small_data):
    q0, u0 = small_data
    solver = FriedrichsSolver(grid, 6)
    q = friedrichs_truncate(q0, 6)
    there = solver.transport_step(q, u0, 1e-3)
    back = solver.transport_step(there, u0, -1e-3)
    assert np.max(np.abs(back.coeffs - q.coeffs)) <= 1e-12


def test_rhs_of_pure_pressure_should_be_the_enthalpy_gradient(grid):
    q0 = single_mode(grid, (1, 0), amplitude=0.01)
    terms = FlowTerms(
        density_advection=False,
        density_compression=False,
        momentum_advection=False,
        viscous_coupling=False,
    )
    dq, du = FriedrichsSolver(grid, 4, PressureLaw(), terms).rhs(q0, zeros(grid, 2))
    assert dq.max_abs_coeff() == 0.0
    # G(1+q) = 2q for the shallow-water law
    expected = -2.0 * differentiate(q0, "gradient").coeffs
    assert np.max(np.abs(du.coeffs - expected)) <= 1e-14


def test_module_level_helpers_should_match_the_solver(grid, small_data):
    q0, u0 = small_data
    solver = FriedrichsSolver(grid, 4)
    state = solver.initial_state(q0, u0)
    dq, du = friedrichs.rhs(state, 4, PressureLaw())
    dq_ref, du_ref = solver.rhs(state.q, state.u)
    assert np.array_equal(dq.coeffs, dq_ref.coeffs)
    assert np.array_equal(du.coeffs, du_ref.coeffs)
    stepped = friedrichs.step(state, 0.01, 4, PressureLaw())
    assert np.array_equal(stepped.q.coeffs, solver.step(state, 0.01).q.coeffs)
    trajectory = friedrichs.run(q0, u0, 0.02, 4, schedule=Schedule(dt=0.01))
    assert trajectory.steps == 2


def _split_nyquist(shifted: np.ndarray) -> np.ndarray:
    """Lattice -N/2..N/2 on both axes, with the Nyquist coefficient shared evenly between the two ends."""
    for axis in (0, 1):
        a = np.moveaxis(shifted, axis, 0)
        shifted = np.moveaxis(np.concatenate([a[:1] / 2, a[1:], a[:1] / 2]), 0, axis)
    return shifted


def _convolution(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Coefficients of the product of two 2-d fields by direct lattice convolution, Nyquist rows dropped."""
    half = a.shape[0] // 2
    full = convolve2d(_split_nyquist(fftshift(a)), _split_nyquist(fftshift(b)))
    out = np.zeros(a.shape, dtype=np.complex128)
    out[1:, 1:] = full[half + 1 : 3 * half, half + 1 : 3 * half]
    return ifftshift(out)


def test_rhs_should_match_direct_convolution_of_every_term(grid, rng):
    n, d = 10, grid.d
    law = PressureLaw(gamma=1.4)
    q = random_field(grid, rng, kmax=10, decay=2.0, amplitude=0.05)
    u = random_field(grid, rng, components=2, kmax=10, decay=2.0, amplitude=0.05)
    dq, du = FriedrichsSolver(grid, n, law).rhs(q, u)

    uc = u.coeffs
    grad_q = differentiate(q, "gradient").coeffs
    grad_u = differentiate(u, "gradient").coeffs
    div_u = differentiate(u, "divergence").coeffs[0]
    grad_log = differentiate(compose(q, LOG_DENSITY), "gradient").coeffs
    one_plus_q = q.coeffs[0].copy()
    one_plus_q[0, 0] += 1.0

    q_dot = -sum(_convolution(uc[j], grad_q[j]) for j in range(d)) - _convolution(one_plus_q, div_u)
    u_dot = np.stack(
        [
            -sum(_convolution(uc[j], grad_u[i * d + j]) for j in range(d))
            + sum(_convolution(grad_u[i * d + j] + grad_u[j * d + i], grad_log[j]) for j in range(d))
            for i in range(d)
        ]
    )
    expected_dq = friedrichs_truncate(SpectralField(grid, q_dot[np.newaxis]), n)
    enthalpy = friedrichs_truncate(compose(q, law.as_nonlinearity()), n)
    expected_du = friedrichs_truncate(SpectralField(grid, u_dot), n) - differentiate(enthalpy, "gradient")

    assert np.max(np.abs(dq.coeffs)) > 1e-6
    assert np.max(np.abs(dq.coeffs - expected_dq.coeffs)) <= 1e-10
    assert np.max(np.abs(du.coeffs - expected_du.coeffs)) <= 1e-10
