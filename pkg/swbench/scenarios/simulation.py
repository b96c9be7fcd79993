from collections.abc import Sequence

from swbench.common.errors import UsageError
from swbench.pydantic_models.scenario import Scenario
from swbench.scenarios.initial_data import InitialData, initial_data
from swbench.solver.friedrichs import FriedrichsSolver, SampleHook
from swbench.solver.pressure import PressureLaw
from swbench.solver.state import FlowTerms, Schedule, Trajectory
from swbench.spectral.grid import PeriodicGrid


def make_grid(scenario: Scenario) -> PeriodicGrid:
    return PeriodicGrid(d=scenario.grid.d, N=scenario.grid.N, a=scenario.grid.periods)


def make_solver(scenario: Scenario, grid: PeriodicGrid | None = None) -> FriedrichsSolver:
    physics = scenario.physics
    return FriedrichsSolver(
        grid or make_grid(scenario),
        scenario.truncation,
        PressureLaw(gamma=physics.gamma, coefficient=physics.coefficient),
        FlowTerms.linear_only() if physics.linear_only else FlowTerms(),
    )


def make_schedule(scenario: Scenario, horizon: float) -> Schedule:
    return Schedule(dt=scenario.run.dt, cfl=scenario.run.cfl, sample_interval=horizon / scenario.run.samples)


def simulate(
    scenario: Scenario,
    *,
    horizon: float | None = None,
    survey: bool | None = None,
    on_sample: Sequence[SampleHook] = (),
) -> tuple[InitialData, Trajectory]:
    """Builds the scenario's data and solver and runs to `horizon`, or to run.T when that is a number."""
    if horizon is None:
        if scenario.horizon_is_auto:
            raise UsageError("An automatic horizon has to be resolved before simulating")
        horizon = float(scenario.run.T)
    grid = make_grid(scenario)
    data = initial_data(scenario.initial_data, grid)
    solver = make_solver(scenario, grid)
    trajectory = solver.run(
        data.q0, data.u0, horizon, make_schedule(scenario, horizon), on_sample=on_sample, survey=survey
    )
    return data, trajectory
