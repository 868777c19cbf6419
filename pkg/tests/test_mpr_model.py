import math

import numpy as np
import pytest

from mpr_gapfill.exceptions import ConfigError
from mpr_gapfill.grid import AngleField, GridField, TransformParams, to_angles
from mpr_gapfill.model import (MprParams, bond_energy, grid_specific_energy, independent_angle_energy,
                               sample_specific_energy)

PARAMS = MprParams(coupling=1.0, q=0.5)


@pytest.mark.parametrize("phi_i, phi_j, expected", [
    (1.3, 1.3, -1.0),
    (0.0, math.pi, 0.0),
    (0.0, 2 * math.pi, 1.0),
])
def test_bond_energy_examples(phi_i, phi_j, expected):
    assert bond_energy(phi_i, phi_j, PARAMS) == pytest.approx(expected, abs=1e-12)


def test_bond_energy_is_symmetric_and_scales_with_coupling():
    strong = MprParams(coupling=2.5, q=0.5)
    assert bond_energy(0.3, 2.0, PARAMS) == pytest.approx(bond_energy(2.0, 0.3, PARAMS))
    assert bond_energy(0.3, 2.0, strong) == pytest.approx(2.5 * bond_energy(0.3, 2.0, PARAMS))


def test_params_validation():
    with pytest.raises(ConfigError):
        MprParams(coupling=0.0)
    with pytest.raises(ConfigError):
        MprParams(q=0.75)
    with pytest.raises(ConfigError):
        MprParams(temperature=-1.0)
    assert PARAMS.max_bond_energy == pytest.approx(1.0)


def test_sample_energy_alternating_two_by_two():
    angles = AngleField([[0.0, math.pi], [math.pi, 0.0]], np.ones((2, 2), dtype=bool))
    stats = sample_specific_energy(angles, PARAMS)
    assert stats.n_bonds == 4
    assert stats.energy == pytest.approx(0.0, abs=1e-12)


def test_sample_bonds_skip_missing_center():
    fixed = np.ones((3, 3), dtype=bool)
    fixed[1, 1] = False
    angles = AngleField(np.zeros((3, 3)), fixed)
    stats = sample_specific_energy(angles, PARAMS)
    assert stats.n_bonds == 8
    assert stats.energy == pytest.approx(-1.0)


def test_no_sample_bonds():
    fixed = np.array([[True, False], [False, True]])
    stats = sample_specific_energy(AngleField(np.zeros((2, 2)), fixed), PARAMS)
    assert stats.energy is None
    assert not stats.has_bonds


def test_fully_fixed_grid_energies_agree(full_grid):
    angles = to_angles(full_grid, TransformParams.from_grid(full_grid))
    stats = sample_specific_energy(angles, PARAMS)
    assert stats.energy == pytest.approx(grid_specific_energy(angles, PARAMS), abs=1e-12)


def test_energy_bounds():
    rng = np.random.default_rng(3)
    grid = GridField(rng.normal(size=(20, 20)))
    angles = to_angles(grid, TransformParams.from_grid(grid))
    e = grid_specific_energy(angles, PARAMS)
    assert -1.0 <= e <= PARAMS.max_bond_energy
    aligned = AngleField(np.full((5, 5), 2.0), np.ones((5, 5), dtype=bool))
    assert grid_specific_energy(aligned, PARAMS) == pytest.approx(-1.0)


def test_independent_angle_energy():
    assert independent_angle_energy(0.5) == pytest.approx(-4.0 / math.pi ** 2)
    rng = np.random.default_rng(11)
    angles = AngleField(rng.uniform(0, 2 * math.pi, size=(200, 200)), np.ones((200, 200), dtype=bool))
    assert grid_specific_energy(angles, PARAMS) == pytest.approx(independent_angle_energy(0.5), abs=0.01)
