from pathlib import Path

import pytest
from pydantic import ValidationError

from swbench.common.constants import DEFAULT_CFL_FACTOR, DEFAULT_ETA
from swbench.pydantic_models.scenario import (
    EstimatesSection,
    GridSection,
    InitialDataSection,
    RunSection,
    Scenario,
)


@pytest.mark.pydantic_model
def test_defaults_should_build_a_valid_scenario():
    scenario = Scenario(name="defaults")
    assert scenario.grid.N == 64
    assert scenario.run.cfl == DEFAULT_CFL_FACTOR
    assert scenario.estimates.eta == DEFAULT_ETA
    assert scenario.horizon_is_auto
    assert scenario.truncation == pytest.approx(64 / 3)


@pytest.mark.pydantic_model
@pytest.mark.parametrize("name", ["", "   "])
def test_blank_name_should_be_rejected(name: str):
    with pytest.raises(ValidationError):
        Scenario(name=name)


@pytest.mark.pydantic_model
def test_unknown_keys_should_be_rejected():
    with pytest.raises(ValidationError):
        Scenario.model_validate({"name": "x", "grid": {"N": 32, "resolution": 2}})
    with pytest.raises(ValidationError):
        Scenario.model_validate({"name": "x", "solver": {}})


@pytest.mark.pydantic_model
@pytest.mark.parametrize("cfl", [1.5, 0.0, -0.1])
def test_cfl_outside_the_admissible_range_should_be_rejected(cfl: float):
    with pytest.raises(ValidationError):
        RunSection(cfl=cfl)


@pytest.mark.pydantic_model
def test_truncation_below_one_should_be_rejected():
    with pytest.raises(ValidationError):
        RunSection(n=0.5)


@pytest.mark.pydantic_model
@pytest.mark.parametrize("T", [0.0, -1.0, "never"])
def test_horizon_should_be_positive_or_auto(T):
    with pytest.raises(ValidationError):
        RunSection(T=T)


@pytest.mark.pydantic_model
@pytest.mark.parametrize("eta", [0.0, 1.5])
def test_eta_outside_the_unit_interval_should_be_rejected(eta: float):
    with pytest.raises(ValidationError):
        EstimatesSection(eta=eta)


@pytest.mark.pydantic_model
@pytest.mark.parametrize("min_density", [1.0, 2.0, 0.0])
def test_min_density_should_lie_below_equilibrium(min_density: float):
    with pytest.raises(ValidationError):
        InitialDataSection(family="near-vacuum", min_density=min_density)


@pytest.mark.pydantic_model
def test_unknown_family_should_be_rejected():
    with pytest.raises(ValidationError):
        InitialDataSection(family="vortex-sheet")


@pytest.mark.pydantic_model
@pytest.mark.parametrize("modes", [[[1, 0, 0]], [[16, 0]], [[0, -20]]])
def test_modes_should_fit_the_grid(modes):
    with pytest.raises(ValidationError):
        Scenario.model_validate(
            {"name": "x", "grid": {"d": 2, "N": 32}, "initial_data": {"family": "trigonometric", "modes": modes}}
        )


@pytest.mark.pydantic_model
def test_overrides_should_replace_only_given_values():
    scenario = Scenario(name="base").with_overrides(
        {"grid": {"N": 128, "d": None}, "run": {"T": 0.5}, "": {"name": "renamed"}}
    )
    assert scenario.name == "renamed"
    assert scenario.grid.N == 128
    assert scenario.grid.d == 2
    assert scenario.run.T == 0.5


@pytest.mark.pydantic_model
def test_overrides_should_be_validated():
    with pytest.raises(ValidationError):
        Scenario(name="base").with_overrides({"estimates": {"eta": 3.0}})


@pytest.mark.pydantic_model
def test_from_toml_should_default_the_name_to_the_file_stem(tmp_path: Path):
    path = tmp_path / "tiny-run.toml"
    path.write_text('[grid]\nN = 32\n\n[run]\nT = 0.1\nsamples = 4\n')
    scenario = Scenario.from_toml(path)
    assert scenario.name == "tiny-run"
    assert scenario.run.T == 0.1
    assert scenario.run.samples == 4


@pytest.mark.pydantic_model
def test_to_json_should_round_trip_through_validation():
    scenario = Scenario(name="json", run=RunSection(T=0.2))
    assert Scenario.model_validate(scenario.to_json()) == scenario


@pytest.mark.pydantic_model
def test_grid_should_accept_one_period_per_axis():
    section = GridSection(d=2, N=32, a=[6.0, 3.0])
    assert section.periods == (6.0, 3.0)
    assert GridSection(a=2.0).periods == 2.0


@pytest.mark.pydantic_model
@pytest.mark.parametrize("a", [[6.0], [1.0, 2.0, 3.0], [1.0, -2.0], [0.0, 1.0]])
def test_grid_should_reject_bad_period_lists(a: list[float]):
    with pytest.raises(ValidationError):
        GridSection(d=2, N=32, a=a)


@pytest.mark.pydantic_model
def test_per_axis_periods_should_load_from_toml(tmp_path: Path):
    path = tmp_path / "box.toml"
    path.write_text("[grid]\nd = 2\nN = 32\na = [6.0, 3.0]\n")
    assert Scenario.from_toml(path).grid.periods == (6.0, 3.0)
