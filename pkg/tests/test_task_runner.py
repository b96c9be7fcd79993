import json
from pathlib import Path

import pytest

from swbench import task_runner
from swbench.common.errors import BlowUpError, UsageError
from swbench.config import ConfigSingleton
from swbench.diagnostics.ledger import CSV_COLUMNS
from swbench.scenarios.presets import NEAR_VACUUM, SMOOTH
from swbench.solver import friedrichs
from swbench.solver.checkpoint import load_checkpoint


@pytest.mark.integration
def test_run_should_write_a_complete_run_directory(tmp_path: Path):
    summary = task_runner.run(SMOOTH, tmp_path)
    run_dir = tmp_path / "smooth"

    assert summary["status"] == "completed"
    assert summary["horizon"] == pytest.approx(0.16)
    assert summary["grid"]["N"] == 16
    assert summary["initial_data"]["flags"] == []
    assert set(summary["solution_norms"]) >= {"q_linf_b21", "u_l1_b22", "divu_l1_b21"}
    assert summary["apriori"]["rows"]

    on_disk = task_runner.load_summary(run_dir)
    assert on_disk["status"] == "completed"
    config = json.loads((run_dir / task_runner.CONFIG_FILE).read_text())
    assert config["scenario"]["name"] == "smooth"
    assert (run_dir / task_runner.LOG_FILE).is_file()

    rows = task_runner.load_ledger(run_dir)
    assert len(rows) == summary["ledger"]["samples"] == 9
    assert set(rows[0]) == set(CSV_COLUMNS)
    assert rows[-1]["time"] == pytest.approx(0.16)


@pytest.mark.integration
def test_run_should_checkpoint_when_asked(tmp_path: Path):
    scenario = SMOOTH.with_overrides({"output": {"checkpoints": True}})
    summary = task_runner.run(scenario, tmp_path)
    trajectory = load_checkpoint(tmp_path / "smooth" / summary["checkpoint"])
    assert len(trajectory) == 9


@pytest.mark.integration
def test_run_should_checkpoint_when_toggled(tmp_path: Path):
    ConfigSingleton.init(toggles={"write-checkpoints": True})
    summary = task_runner.run(SMOOTH, tmp_path)
    assert summary["checkpoint"] == "checkpoints/smooth.npz"


def test_run_should_refuse_an_auto_horizon_for_near_vacuum_data(tmp_path: Path):
    scenario = NEAR_VACUUM.with_overrides({"run": {"T": "auto"}, "grid": {"N": 16}})
    with pytest.raises(UsageError):
        task_runner.run(scenario, tmp_path)
    summary = task_runner.load_summary(tmp_path / "near-vacuum")
    assert summary["status"] == "failed"
    assert summary["error"].startswith("UsageError")
    assert summary["initial_data"]["flags"] == ["near-vacuum"]


@pytest.mark.integration
def test_blowup_should_be_recorded_and_reraised(tmp_path: Path, monkeypatch):
    monkeypatch.setattr(friedrichs, "BLOWUP_VELOCITY_BOUND", 1e-9)
    with pytest.raises(BlowUpError):
        task_runner.run(SMOOTH, tmp_path)
    summary = task_runner.load_summary(tmp_path / "smooth")
    assert summary["status"] == "blowup"
    assert summary["blowup"]["step"] >= 0
    assert "blow-up" in task_runner.describe(tmp_path / "smooth")


@pytest.mark.integration
def test_describe_should_digest_a_finished_run(tmp_path: Path):
    task_runner.run(SMOOTH, tmp_path)
    text = task_runner.describe(tmp_path / "smooth")
    assert text.startswith("run smooth: completed")
    assert "beta(T)=" in text
    assert "a priori (eta=0.1" in text


def test_missing_summary_should_raise(tmp_path: Path):
    with pytest.raises(UsageError):
        task_runner.load_summary(tmp_path)
    with pytest.raises(UsageError):
        task_runner.describe(tmp_path)


def test_ledger_with_a_foreign_header_should_raise(tmp_path: Path):
    (tmp_path / task_runner.LEDGER_FILE).write_text("# swbench ledger schema 0\ntime\n0.0\n")
    with pytest.raises(UsageError):
        task_runner.load_ledger(tmp_path)


def test_missing_ledger_should_read_as_empty(tmp_path: Path):
    assert task_runner.load_ledger(tmp_path) == []
