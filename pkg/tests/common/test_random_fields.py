import numpy as np
import pytest

from swbench.common.errors import UsageError
from swbench.common.random_fields import half_lattice, random_field, single_mode
from swbench.spectral.field import hermitian_defect
from swbench.spectral.grid import PeriodicGrid


def test_half_lattice_should_cover_every_nonzero_mode_once():
    modes = half_lattice(2, 2)
    assert len(modes) == (5 * 5 - 1) // 2
    assert all(tuple(-k for k in m) not in modes for m in modes)


def test_random_field_should_not_depend_on_grid_size():
    coarse = random_field(PeriodicGrid(d=2, N=32), np.random.default_rng(7), kmax=4)
    fine = random_field(PeriodicGrid(d=2, N=64), np.random.default_rng(7), kmax=4)
    assert coarse.coeffs[0, 3, -2] == fine.coeffs[0, 3, -2]


def test_random_field_should_be_real_and_mean_zero(grid, rng):
    u = random_field(grid, rng, components=2)
    assert hermitian_defect(u) <= 1e-14
    assert np.all(u.mean == 0.0)


def test_random_field_should_refuse_unresolved_kmax(rng):
    with pytest.raises(UsageError):
        random_field(PeriodicGrid(d=2, N=16), rng, kmax=8)


def test_single_mode_should_give_twice_the_amplitude_as_cosine(grid):
    u = single_mode(grid, (0, 2), amplitude=0.25, components=2, component=1)
    _, x1 = grid.coordinates
    values = u.values
    assert np.max(np.abs(values[1] - 0.5 * np.cos(2 * x1))) <= 1e-14
    assert np.max(np.abs(values[0])) == 0.0
