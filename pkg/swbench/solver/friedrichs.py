"""
Friedrichs-truncated shallow-water system on L^2_n = {f : supp f^ in 1/n <= |xi| <= n}:

    d_t q + J_n(u . grad q) + J_n((1 + q) div u) = 0
    d_t u_bar - A u_bar = -J_n(u . grad u) + 2 J_n(D(u) . grad ln(1 + q)) - grad J_n G(1 + q)
    u = u_lin + u_bar,  u_lin(t) = e^{tA} J_n u0,  (q, u_bar)(0) = (J_n q0, 0)

with A = Delta + grad div and D(u) the symmetric gradient. Time stepping is the classical four-stage
integrating-factor (Lawson) scheme: the Lame part of u_bar is carried exactly by e^{hA}, q has no
linear part and is advanced explicitly in the same stages, u_lin is advanced exactly.
"""

import math
from collections.abc import Callable, Sequence
from functools import lru_cache

import numpy as np
from loguru import logger

from swbench.analysis.composition import LOG_DENSITY, check_vacuum, compose
from swbench.analysis.littlewood_paley import friedrichs_truncate
from swbench.common.constants import BLOWUP_VELOCITY_BOUND
from swbench.common.errors import BlowUpError, StepSizeError, UsageError, VacuumError
from swbench.config import toggle, vacuum_threshold
from swbench.pydantic_models.reports import BlowUpReport
from swbench.solver.pressure import PressureLaw
from swbench.solver.semigroup import LamePropagator
from swbench.solver.state import FlowTerms, Schedule, SolverState, Trajectory
from swbench.spectral.field import SpectralField, inverse, zeros
from swbench.spectral.grid import PeriodicGrid
from swbench.spectral.operators import differentiate, from_padded_values, padded_values

SampleHook = Callable[[SolverState], None]

# Relative slack under which a step is stretched to land on the next sample time instead of leaving a sliver.
_LANDING_SLACK = 1e-9


@lru_cache(maxsize=16)
def _lame_propagator(grid: PeriodicGrid, h: float) -> LamePropagator:
    return LamePropagator(grid, h)


def _real_padded(u: SpectralField) -> np.ndarray:
    return padded_values(u).real


class FriedrichsSolver:
    def __init__(
        self,
        grid: PeriodicGrid,
        n: float,
        law: PressureLaw | None = None,
        terms: FlowTerms | None = None,
    ) -> None:
        if n < 1:
            raise UsageError(f"The truncation parameter n must be >= 1, got {n}")
        self.grid = grid
        self.n = float(n)
        self.law = law or PressureLaw()
        self.terms = terms or FlowTerms()
        self._pressure = self.law.as_nonlinearity()

    # =============================================================
    #                  Right-hand side
    # =============================================================

    def rhs(self, q: SpectralField, u: SpectralField) -> tuple[SpectralField, SpectralField]:
        """Time derivatives of (q, u_bar) without the Lame term; every product is formed on the 3/2 padded grid."""
        grid, d, terms = self.grid, self.grid.d, self.terms
        velocity = _real_padded(u)
        q_work = np.zeros(velocity.shape[1:])
        u_work = np.zeros(velocity.shape)

        if terms.density_advection:
            grad_q = _real_padded(differentiate(q, "gradient"))
            q_work -= np.sum(velocity * grad_q, axis=0)
        if terms.density_compression:
            div_u = _real_padded(differentiate(u, "divergence"))[0]
            q_work -= (1.0 + _real_padded(q)[0]) * div_u

        if terms.momentum_advection or terms.viscous_coupling:
            # grad_u[i * d + j] = d_j u_i
            grad_u = _real_padded(differentiate(u, "gradient"))
        if terms.momentum_advection:
            for i in range(d):
                u_work[i] -= sum(velocity[j] * grad_u[i * d + j] for j in range(d))
        if terms.viscous_coupling:
            grad_log = _real_padded(differentiate(compose(q, LOG_DENSITY), "gradient"))
            for i in range(d):
                u_work[i] += sum(
                    (grad_u[i * d + j] + grad_u[j * d + i]) * grad_log[j] for j in range(d)
                )

        dq = friedrichs_truncate(from_padded_values(q_work, grid), self.n)
        du = friedrichs_truncate(from_padded_values(u_work, grid), self.n)
        if terms.pressure:
            enthalpy = friedrichs_truncate(compose(q, self._pressure), self.n)
            du = du - differentiate(enthalpy, "gradient")
        return dq, du

    # =============================================================
    #                  Time stepping
    # =============================================================

    def dt_max(self, state: SolverState) -> float:
        """Advective bound on the truncated space, 1 / (n max|u| + 1)."""
        return 1.0 / (self.n * state.max_velocity() + 1.0)

    def _blowup(self, reason: str, state: SolverState, step: int, **overrides) -> BlowUpError:
        report = BlowUpReport(
            reason=reason,
            time=state.time,
            step=step,
            min_density=overrides.get("min_density", state.min_density()),
            max_velocity=overrides.get("max_velocity", state.max_velocity()),
        )
        return BlowUpError(report)

    def _check(self, state: SolverState, step: int) -> None:
        if not state.is_finite():
            raise self._blowup(
                "nan", state, step, min_density=math.nan, max_velocity=math.nan
            )
        min_density = state.min_density()
        max_velocity = state.max_velocity()
        if not min_density > vacuum_threshold():
            raise self._blowup("vacuum", state, step, min_density=min_density)
        if max_velocity > BLOWUP_VELOCITY_BOUND:
            raise self._blowup("velocity-bound", state, step, max_velocity=max_velocity)

    def step(
        self, state: SolverState, dt: float, *, index: int = 0, time: float | None = None
    ) -> SolverState:
        """
        One integrating-factor RK4 step. `time` overrides state.time + dt so runs land exactly on sample times.
        """
        bound = self.dt_max(state)
        if not 0 < dt <= bound * (1 + 1e-12):
            raise StepSizeError(dt, bound)
        half = _lame_propagator(self.grid, dt / 2)
        full = _lame_propagator(self.grid, dt)
        q0, w0 = state.q, state.u_bar
        lin_half, lin_full = half(state.u_lin), full(state.u_lin)
        try:
            kq1, kw1 = self.rhs(q0, state.u)
            q_a = q0 + (dt / 2) * kq1
            w_a = half(w0 + (dt / 2) * kw1)
            kq2, kw2 = self.rhs(q_a, lin_half + w_a)
            q_b = q0 + (dt / 2) * kq2
            w_b = half(w0) + (dt / 2) * kw2
            kq3, kw3 = self.rhs(q_b, lin_half + w_b)
            q_c = q0 + dt * kq3
            w_c = full(w0) + dt * half(kw3)
            kq4, kw4 = self.rhs(q_c, lin_full + w_c)
        except VacuumError as exc:
            raise self._blowup("vacuum", state, index, min_density=exc.minimum) from exc

        q_new = q0 + (dt / 6) * (kq1 + 2.0 * kq2 + 2.0 * kq3 + kq4)
        w_new = full(w0) + (dt / 6) * (full(kw1) + 2.0 * half(kw2 + kw3) + kw4)
        if toggle("rezero-density-mean"):
            q_new = q_new.with_coeffs(q_new.coeffs, mean_zero=True)
        new_state = SolverState(
            time=state.time + dt if time is None else time,
            q=q_new,
            u_lin=lin_full,
            u_bar=w_new,
        )
        self._check(new_state, index)
        return new_state

    # =============================================================
    #                  Runs
    # =============================================================

    def initial_state(self, q0: SpectralField, u0: SpectralField) -> SolverState:
        """(J_n q0, J_n u0, 0) at t = 0."""
        if q0.grid != self.grid or u0.grid != self.grid:
            raise UsageError("Initial data and solver live on different grids")
        if not q0.is_scalar or u0.components != self.grid.d:
            raise UsageError("Initial data must be a scalar q0 and a vector u0")
        q = friedrichs_truncate(q0, self.n)
        check_vacuum(inverse(q), "initial density after truncation")
        return SolverState(
            time=0.0,
            q=q,
            u_lin=friedrichs_truncate(u0, self.n),
            u_bar=zeros(self.grid, self.grid.d),
        )

    def run(
        self,
        q0: SpectralField,
        u0: SpectralField,
        horizon: float,
        schedule: Schedule | None = None,
        on_sample: Sequence[SampleHook] = (),
        survey: bool | None = None,
    ) -> Trajectory:
        """
        Integrate to the horizon. On blow-up a survey run stops and records the report on the trajectory;
        otherwise the BlowUpError propagates.
        """
        if not horizon > 0:
            raise UsageError(f"The horizon must be positive, got {horizon}")
        schedule = schedule or Schedule()
        survey = toggle("survey-mode") if survey is None else survey
        state = self.initial_state(q0, u0)
        trajectory = Trajectory(grid=self.grid, n=self.n, law=self.law)
        logger.info(
            f"[Solver] Run to T={horizon:.4g}: d={self.grid.d}, N={self.grid.N}, n={self.n:g}, gamma={self.law.gamma:g}"
        )

        def record(sample: SolverState) -> None:
            trajectory.append(sample)
            for hook in on_sample:
                hook(sample)

        record(state)
        if schedule.sample_interval is None:
            sample_times = np.array([horizon])
        else:
            count = int(math.floor(horizon / schedule.sample_interval + _LANDING_SLACK))
            sample_times = schedule.sample_interval * np.arange(1, count + 1)
            sample_times = np.append(sample_times[sample_times < horizon * (1 - _LANDING_SLACK)], horizon)
        target_index = 0

        while target_index < sample_times.size:
            target = float(sample_times[target_index])
            dt = schedule.dt if schedule.dt is not None else schedule.cfl * self.dt_max(state)
            landing = state.time + dt >= target - _LANDING_SLACK * dt
            if landing:
                dt = target - state.time
            try:
                state = self.step(
                    state, dt, index=trajectory.steps + 1, time=target if landing else None
                )
            except BlowUpError as exc:
                logger.error(f"[Solver] {exc}")
                trajectory.blowup = exc.report
                if survey:
                    break
                raise
            trajectory.steps += 1
            logger.debug(
                f"[Solver] step {trajectory.steps}: t={state.time:.6g}, dt={dt:.3e}, max|u|={state.max_velocity():.3e}"
            )
            if landing:
                target_index += 1
            if landing or schedule.sample_interval is None:
                record(state)

        if trajectory.completed:
            logger.info(
                f"[Solver] Reached T={state.time:.4g} after {trajectory.steps} steps ({len(trajectory)} samples)"
            )
        return trajectory

    def transport_step(self, q: SpectralField, velocity: SpectralField, dt: float) -> SpectralField:
        """Classical RK4 for d_t q + J_n(u . grad q) = 0 with u frozen; dt may be negative."""
        frozen = _real_padded(velocity)

        def derivative(f: SpectralField) -> SpectralField:
            grad = _real_padded(differentiate(f, "gradient"))
            return friedrichs_truncate(
                from_padded_values(-np.sum(frozen * grad, axis=0), self.grid), self.n
            )

        k1 = derivative(q)
        k2 = derivative(q + (dt / 2) * k1)
        k3 = derivative(q + (dt / 2) * k2)
        k4 = derivative(q + dt * k3)
        return q + (dt / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rhs(
    state: SolverState, n: float, law: PressureLaw, terms: FlowTerms | None = None
) -> tuple[SpectralField, SpectralField]:
    return FriedrichsSolver(state.grid, n, law, terms).rhs(state.q, state.u)


def step(
    state: SolverState,
    dt: float,
    n: float,
    law: PressureLaw,
    terms: FlowTerms | None = None,
) -> SolverState:
    return FriedrichsSolver(state.grid, n, law, terms).step(state, dt)


def run(
    q0: SpectralField,
    u0: SpectralField,
    horizon: float,
    n: float,
    law: PressureLaw | None = None,
    schedule: Schedule | None = None,
    *,
    terms: FlowTerms | None = None,
    on_sample: Sequence[SampleHook] = (),
    survey: bool | None = None,
) -> Trajectory:
    solver = FriedrichsSolver(q0.grid, n, law, terms)
    return solver.run(q0, u0, horizon, schedule, on_sample=on_sample, survey=survey)
