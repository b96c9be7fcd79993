import math

import numpy as np
import pytest

from swbench.common.errors import UsageError
from swbench.common.random_fields import random_field
from swbench.diagnostics.uniqueness import osgood_modulus, uniqueness_gap
from swbench.solver.friedrichs import FriedrichsSolver
from swbench.solver.state import Schedule
from swbench.spectral.grid import PeriodicGrid


def _run(grid, n: float, *, q_shift: float = 0.0, horizon: float = 0.04, samples: int = 4):
    rng = np.random.default_rng(8)
    q0 = random_field(grid, rng, kmax=3, decay=2.0, amplitude=0.02)
    u0 = random_field(grid, rng, components=grid.d, kmax=3, decay=2.0, amplitude=0.02)
    q0 = q0 * (1.0 + q_shift)
    return FriedrichsSolver(grid, n).run(q0, u0, horizon, Schedule(sample_interval=horizon / samples))


@pytest.fixture
def coarse() -> PeriodicGrid:
    return PeriodicGrid(d=2, N=16)


def test_osgood_modulus_should_match_its_definition():
    r, W = np.array([1e-3, 0.5, 2.0]), 3.0
    assert np.allclose(osgood_modulus(r, W), r * np.log(math.e + W / r), rtol=1e-14)


def test_osgood_modulus_should_vanish_at_zero_and_stay_finite_for_tiny_gaps():
    assert osgood_modulus(0.0, 1.0) == 0.0
    tiny = osgood_modulus(np.array([1e-12, 1e-300]), 5.0)
    assert np.all(np.isfinite(tiny))
    assert tiny[0] == pytest.approx(1e-12 * math.log(math.e + 5e12), rel=1e-12)


def test_identical_runs_should_have_no_gap(coarse):
    run = _run(coarse, 5)
    report = uniqueness_gap(run, run)
    assert report.route == "b2inf-osgood"
    assert report.terminal.beta_delta == 0.0
    assert report.terminal.dq_linf == 0.0
    assert report.gronwall_factor == 0.0
    assert report.growth_exponent is None
    assert not report.linear_part_mismatch


def test_runs_at_different_truncations_should_flag_different_linear_parts(coarse):
    report = uniqueness_gap(_run(coarse, 2), _run(coarse, 4))
    assert report.linear_part_mismatch
    assert report.terminal.beta_delta > 0.0
    assert report.terminal.osgood_modulus >= report.terminal.beta_delta
    assert math.isfinite(report.gronwall_factor)


def test_perturbed_density_should_give_a_growth_exponent(coarse):
    report = uniqueness_gap(_run(coarse, 5), _run(coarse, 5, q_shift=1e-6))
    assert not report.linear_part_mismatch
    assert report.rows[0].dq_linf > 0.0
    assert report.growth_exponent is not None
    assert math.isfinite(report.gronwall_factor)
    V = [row.V for row in report.rows]
    assert V == sorted(V)
    assert report.to_json()["route"] == "b2inf-osgood"


def test_three_dimensional_runs_should_use_the_summable_route():
    grid = PeriodicGrid(d=3, N=8)
    run = _run(grid, 3, horizon=0.02, samples=2)
    assert uniqueness_gap(run, run).route == "b21"


def test_gap_should_refuse_runs_on_other_grids(coarse):
    with pytest.raises(UsageError):
        uniqueness_gap(_run(coarse, 5), _run(PeriodicGrid(d=2, N=32), 5))


def test_gap_should_refuse_runs_with_other_sample_times(coarse):
    with pytest.raises(UsageError):
        uniqueness_gap(_run(coarse, 5), _run(coarse, 5, samples=2))
