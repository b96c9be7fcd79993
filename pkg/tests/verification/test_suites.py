import pytest

from swbench.common.errors import UsageError
from swbench.config import ConfigSingleton
from swbench.spectral.grid import PeriodicGrid
from swbench.verification import suites
from swbench.verification.suites import SUITES, run_suite


def _names(report) -> list[str]:
    return [c.name for c in report.checks]


@pytest.mark.integration
@pytest.mark.parametrize("d, N", [(1, 32), (2, 16)])
def test_lp_suite_should_pass(d: int, N: int):
    report = run_suite("lp", PeriodicGrid(d=d, N=N), samples=3)
    assert report.passed, [c for c in report.checks if not c.passed]
    assert report.name == "lp"
    assert {"partition-of-unity", "block-orthogonality", "bernstein", "chemin-lerner-minkowski"} <= set(_names(report))


@pytest.mark.integration
def test_paraproduct_suite_should_pass():
    report = run_suite("paraproduct", PeriodicGrid(d=2, N=32), samples=3)
    assert report.passed, [c for c in report.checks if not c.passed]
    assert "bony-identity" in _names(report)
    assert "composition-chain-rule" in _names(report)
    assert "composition-aliasing" in _names(report)


@pytest.mark.integration
def test_paraproduct_suite_should_skip_aliasing_when_toggled_off():
    ConfigSingleton.init(toggles={"measure-composition-aliasing": False})
    report = run_suite("paraproduct", PeriodicGrid(d=1, N=32), samples=2)
    assert "composition-aliasing" not in _names(report)


@pytest.mark.integration
def test_semigroup_suite_should_pass():
    report = run_suite("semigroup", PeriodicGrid(d=2, N=16), samples=3)
    assert report.passed, [c for c in report.checks if not c.passed]
    assert "coupled-mode-expm" in _names(report)
    assert "damping-high-frequency-spread" in _names(report)


def test_semigroup_suite_should_need_two_dimensions():
    with pytest.raises(UsageError):
        run_suite("semigroup", PeriodicGrid(d=1, N=16), samples=1)


def test_unknown_suite_should_raise():
    with pytest.raises(UsageError):
        run_suite("fourier", PeriodicGrid(d=2, N=16))
    assert sorted(SUITES) == ["lp", "paraproduct", "semigroup"]


def test_failed_check_should_be_a_row_not_an_exception(monkeypatch):
    monkeypatch.setattr(suites, "PARTITION_TOLERANCE", -1.0)
    report = run_suite("lp", PeriodicGrid(d=1, N=16), samples=1)
    assert not report.passed
    failed = [c.name for c in report.checks if not c.passed]
    assert failed == ["partition-of-unity"]
    assert report.to_json()["passed"] is False
