import math

import numpy as np
import pytest

from swbench.common.errors import UsageError
from swbench.diagnostics.damping import (
    damping_report,
    decay_rates,
    expected_boundary,
    mode_dissipation,
)
from swbench.spectral.grid import PeriodicGrid


def test_low_frequencies_should_decay_at_half_the_heat_rate():
    k = np.array([0.05, 0.1, 0.3])
    assert np.allclose(decay_rates(k, 1.0), k**2 / 2, rtol=1e-10)


def test_high_frequencies_should_decay_at_the_pressure_rate():
    rates = decay_rates(np.array([200.0, 400.0]), 3.0)
    assert np.allclose(rates, 3.0, rtol=1e-3)


def test_lame_viscosity_should_halve_the_high_frequency_rate():
    rates = decay_rates(np.array([400.0]), 3.0, viscosity="lame")
    assert rates[0] == pytest.approx(1.5, rel=1e-3)


def test_rates_should_need_a_positive_time():
    with pytest.raises(UsageError):
        decay_rates(np.array([1.0]), 1.0, t=0.0)


def test_unknown_viscosity_should_be_refused():
    with pytest.raises(UsageError):
        mode_dissipation(np.array([1.0]), "bulk", 1.0)


@pytest.mark.acceptance
def test_unit_pressure_slope_should_show_both_regimes():
    report = damping_report(1.0)
    assert report.high_frequency_spread < 0.1
    assert abs(report.low_frequency_exponent - 2.0) <= 0.2
    assert report.high_frequency_rate == pytest.approx(1.0, rel=0.1)
    assert report.boundary == pytest.approx(expected_boundary(1.0), rel=0.1)
    assert {row.regime for row in report.rows} == {"low", "high"}
    assert not report.degenerate


@pytest.mark.parametrize("slope", [0.25, 4.0])
def test_regime_boundary_should_follow_the_pressure_slope(slope: float):
    report = damping_report(slope)
    assert report.boundary == pytest.approx(expected_boundary(slope), rel=0.1)


def test_lame_boundary_should_halve():
    assert expected_boundary(4.0, "lame") == pytest.approx(expected_boundary(4.0) / 2)
    report = damping_report(4.0, viscosity="lame")
    assert report.boundary == pytest.approx(2.0, rel=0.1)


def test_non_positive_slope_should_be_reported_degenerate():
    report = damping_report(0.0)
    assert report.degenerate
    assert report.boundary is None
    assert report.notes
    assert math.isnan(expected_boundary(0.0))


def test_frequencies_should_be_positive():
    with pytest.raises(UsageError):
        damping_report(1.0, frequencies=np.array([0.0, 1.0]))


def test_hybrid_decay_should_be_reported_on_a_grid():
    report = damping_report(1.0, grid=PeriodicGrid(d=2, N=16))
    times = [t for t, _ in report.hybrid_decay]
    norms = [v for _, v in report.hybrid_decay]
    assert times[0] == 0.0
    assert norms[-1] < norms[0]
    assert len(report.to_json()["hybrid_decay"]) == len(times)
