import numpy as np
import pytest

from swbench.common.errors import UsageError
from swbench.common.random_fields import random_field
from swbench.diagnostics.ledger import CSV_COLUMNS, EstimateLedger
from swbench.solver.friedrichs import FriedrichsSolver
from swbench.solver.state import FlowTerms, Schedule
from swbench.spectral.grid import PeriodicGrid


@pytest.fixture
def coarse() -> PeriodicGrid:
    return PeriodicGrid(d=2, N=16)


def _run(grid, terms=None, amplitude=0.05, horizon=0.1):
    rng = np.random.default_rng(11)
    q0 = random_field(grid, rng, kmax=3, amplitude=amplitude)
    u0 = random_field(grid, rng, components=2, kmax=3, amplitude=amplitude)
    solver = FriedrichsSolver(grid, 5, terms=terms)
    return solver.run(q0, u0, horizon, Schedule(sample_interval=horizon / 5))


def test_hook_and_fold_should_give_the_same_rows(coarse):
    rng = np.random.default_rng(11)
    q0 = random_field(coarse, rng, kmax=3, amplitude=0.05)
    u0 = random_field(coarse, rng, components=2, kmax=3, amplitude=0.05)
    hooked = EstimateLedger(coarse)
    trajectory = FriedrichsSolver(coarse, 5).run(
        q0, u0, 0.1, Schedule(sample_interval=0.02), on_sample=(hooked.add_sample,)
    )
    folded = EstimateLedger.from_trajectory(trajectory)
    assert hooked.rows == folded.rows
    assert len(folded) == len(trajectory)


def test_ledger_columns_should_be_running_quantities(coarse):
    ledger = EstimateLedger.from_trajectory(_run(coarse))
    for name in ("q_linf", "V", "ubar_linf", "ubar_l1", "linear_smallness", "divu_l1"):
        assert np.all(np.diff(ledger.column(name)) >= 0), name
    first = ledger.rows[0]
    assert first.V == first.ubar_l1 == first.beta == 0.0
    for row in ledger.rows:
        assert row.beta == pytest.approx(row.ubar_linf + row.ubar_l1)
        assert row.split_residual <= 1e-12
        assert row.q_mean <= 1e-13


def test_linear_only_run_should_have_zero_transport_constant(coarse):
    ledger = EstimateLedger.from_trajectory(_run(coarse, terms=FlowTerms.linear_only()))
    assert ledger.transport_constant() == 0.0
    assert ledger.final.beta == 0.0
    assert ledger.final.linear_smallness > 0.0


def test_ledger_should_refuse_samples_out_of_order(coarse):
    trajectory = _run(coarse)
    ledger = EstimateLedger(coarse)
    ledger.add_sample(trajectory.states[1])
    with pytest.raises(UsageError):
        ledger.add_sample(trajectory.states[0])


def test_ledger_should_refuse_samples_from_other_grids(coarse, grid):
    with pytest.raises(UsageError):
        EstimateLedger(grid).add_sample(_run(coarse).initial)


def test_empty_ledger_should_have_no_final_row(coarse):
    with pytest.raises(UsageError):
        _ = EstimateLedger(coarse).final


def test_unknown_column_should_be_refused(coarse):
    with pytest.raises(UsageError):
        EstimateLedger(coarse).column("pressure")


def test_csv_should_carry_the_schema_header(coarse, tmp_path):
    ledger = EstimateLedger.from_trajectory(_run(coarse))
    path = ledger.to_csv(tmp_path / "ledger.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "# swbench ledger schema 1"
    assert tuple(lines[1].split(",")) == CSV_COLUMNS
    assert len(lines) == len(ledger) + 2


def test_json_summary_should_include_the_regularity_profile(coarse):
    summary = EstimateLedger.from_trajectory(_run(coarse)).to_json()
    profile = summary["regularity_profile"]
    assert profile["ubar_l2_sum"] <= profile["ubar_l1_sum"]
    assert summary["final"]["time"] == pytest.approx(0.1)
    assert summary["transport_constant"] >= 0.0
