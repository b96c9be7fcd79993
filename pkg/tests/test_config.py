import pytest

from swbench.common.constants import VACUUM_THRESHOLD
from swbench.config import ConfigSingleton, toggle, vacuum_threshold


def test_uninitialized_access_fails():
    with pytest.raises(RuntimeError):
        _ = ConfigSingleton.config.seed


def test_double_init_fails():
    ConfigSingleton.init()
    with pytest.raises(RuntimeError):
        ConfigSingleton.init()


def test_reset_allows_reinit():
    ConfigSingleton.init(seed=1)
    ConfigSingleton.reset()
    ConfigSingleton.init(seed=2)
    assert ConfigSingleton.config.seed == 2


@pytest.mark.parametrize("workers", [0, -3])
def test_init_should_reject_non_positive_workers(workers: int):
    with pytest.raises(ValueError):
        ConfigSingleton.init(workers=workers)


@pytest.mark.parametrize("threshold", [0.0, 1.0, -1e-6, 2.0])
def test_init_should_reject_vacuum_threshold_outside_unit_interval(threshold: float):
    with pytest.raises(ValueError):
        ConfigSingleton.init(vacuum_threshold=threshold)


def test_init_should_have_non_empty_toggles():
    ConfigSingleton.init()
    assert ConfigSingleton.config.toggles


def test_toggles_should_default_unknown_names_to_false():
    ConfigSingleton.init()
    assert ConfigSingleton.config.toggles["no-such-toggle"] is False


def test_init_should_apply_toggle_overrides():
    ConfigSingleton.init(toggles={"write-checkpoints": True, "rezero-density-mean": False})
    assert toggle("write-checkpoints")
    assert not toggle("rezero-density-mean")


def test_helpers_should_fall_back_to_constants_without_config():
    assert vacuum_threshold() == VACUUM_THRESHOLD
    assert toggle("rezero-density-mean")
    assert toggle("measure-composition-aliasing")
    assert not toggle("survey-mode")


def test_helpers_should_read_the_initialized_config():
    ConfigSingleton.init(vacuum_threshold=1e-3, toggles={"survey-mode": True})
    assert vacuum_threshold() == 1e-3
    assert toggle("survey-mode")
