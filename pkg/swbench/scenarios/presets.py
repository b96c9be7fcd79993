from swbench.common.errors import UsageError
from swbench.pydantic_models.scenario import (
    EstimatesSection,
    GridSection,
    InitialDataSection,
    RunSection,
    Scenario,
)

SMALL_DATA = Scenario(
    name="small-data",
    grid=GridSection(d=2, N=128),
    initial_data=InitialDataSection(family="multiscale", q_target=0.05, u_target=0.05, seed=0),
    run=RunSection(T="auto"),
    estimates=EstimatesSection(eta=0.1),
)

LARGE_DATA = Scenario(
    name="large-data",
    grid=GridSection(d=2, N=64),
    initial_data=InitialDataSection(family="multiscale", q_target=1.0, u_target=0.5, seed=0),
    run=RunSection(T=0.05),
    estimates=EstimatesSection(eta=0.1),
)

NEAR_VACUUM = Scenario(
    name="near-vacuum",
    grid=GridSection(d=2, N=64),
    initial_data=InitialDataSection(family="near-vacuum", min_density=1e-3, u_amplitude=0.1),
    run=RunSection(T=0.01),
)

# Smooth low-mode data for the temporal self-convergence study.
SMOOTH = Scenario(
    name="smooth",
    grid=GridSection(d=2, N=16),
    initial_data=InitialDataSection(family="trigonometric", q_amplitude=0.2, u_amplitude=0.2),
    run=RunSection(T=0.16, n=5, dt=0.02, samples=8),
)

PRESETS: dict[str, Scenario] = {
    s.name: s for s in (SMALL_DATA, LARGE_DATA, NEAR_VACUUM, SMOOTH)
}


def get_preset(name: str) -> Scenario:
    if name not in PRESETS:
        raise UsageError(f"Unknown preset {name}, expected one of {sorted(PRESETS)}")
    return PRESETS[name]
