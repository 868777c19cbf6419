"""
Shared fixtures: small grids, a cheap monotone calibration curve and a fast run configuration.
"""

import math

import numpy as np
import pytest

from mpr_gapfill.calibration import CalibrationCurve
from mpr_gapfill.config import RunConfig
from mpr_gapfill.grid import GridField
from mpr_gapfill.model import independent_angle_energy


@pytest.fixture
def analytic_curve():
    """Smooth, strictly increasing e(T) from -1 at T -> 0 towards the independent-angle limit."""
    temperatures = np.geomspace(1e-4, 10.0, 48)
    e_inf = independent_angle_energy(0.5)
    energies = -1.0 + (1.0 + e_inf) * temperatures / (temperatures + 0.1)
    return CalibrationCurve(temperatures, energies, np.zeros(48), energies.copy(),
                            q=0.5, coupling=1.0, ref_size=16, sweeps=60, seed=1)


@pytest.fixture
def fast_config(tmp_path):
    return RunConfig(block_size=8, n_fit=10, n_f=5, max_sweeps=60, m_avg=10, cal_size=8,
                     cal_points=6, cal_sweeps=60, calibration_dir=str(tmp_path / 'cache'))


@pytest.fixture
def smooth_grid():
    """16x16 smooth ramp with a quarter of the sites missing."""
    rows, cols = np.indices((16, 16))
    values = 10.0 * np.sin(rows / 5.0) + cols * 0.5
    rng = np.random.default_rng(7)
    mask = rng.random((16, 16)) > 0.25
    return GridField(values, mask)


@pytest.fixture
def full_grid():
    rows, cols = np.indices((12, 12))
    return GridField(np.cos(rows / 3.0) * 5.0 + np.sin(cols / 4.0) * 3.0 + math.pi)
