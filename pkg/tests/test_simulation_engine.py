import math

import numpy as np
import pytest

from mpr_gapfill.exceptions import ConfigError, NoSamplesError
from mpr_gapfill.grid import AngleField, GridField, TemperatureField, make_blocks
from mpr_gapfill.model import MprParams, grid_specific_energy, independent_angle_energy
from mpr_gapfill.simulation import (CheckerboardSampler, EnergyTrace, InitStrategy, SimulationConfig,
                                    detect_equilibrium, first_equilibrium, initialize_angles, metropolis_sweep,
                                    run_conditional_simulation, run_unconditional_simulation, slope_test)

PARAMS = MprParams()
FAST = SimulationConfig(n_fit=10, n_f=5, max_sweeps=60, m_avg=10, seed=5)


def _trace(energies):
    trace = EnergyTrace()
    for e in energies:
        trace.append(e, 0.5)
    return trace


class TestDetectEquilibrium:
    config = SimulationConfig(n_fit=20, n_f=5, max_sweeps=100)

    def test_short_trace_is_never_equilibrated(self):
        assert not detect_equilibrium(_trace([-0.5] * 10), self.config)

    def test_flat_trace_at_check_point(self):
        assert detect_equilibrium(_trace([-0.5] * 25), self.config)

    def test_only_checked_every_n_f_sweeps(self):
        assert not detect_equilibrium(_trace([-0.5] * 26), self.config)
        assert detect_equilibrium(_trace([-0.5] * 30), self.config)

    def test_falling_trace_is_not_equilibrated(self):
        assert not detect_equilibrium(_trace(-0.01 * np.arange(25)), self.config)

    def test_rising_trace_counts_as_equilibrated(self):
        assert detect_equilibrium(_trace(0.01 * np.arange(25)), self.config)

    def test_explicit_tolerance(self):
        config = SimulationConfig(n_fit=20, n_f=5, max_sweeps=100, slope_tolerance=0.02)
        assert detect_equilibrium(_trace(-0.01 * np.arange(25)), config)

    def test_settled_trace_with_small_drift(self):
        # Noise-free drift of -3e-6 per sweep after a drop of about 0.58
        energies = [-0.4] + [-0.98 - 3e-6 * i for i in range(24)]
        assert detect_equilibrium(_trace(energies), self.config)
        strict = SimulationConfig(n_fit=20, n_f=5, max_sweeps=100, relative_slope_tolerance=0.0)
        assert not detect_equilibrium(_trace(energies), strict)

    def test_first_equilibrium(self):
        energies = list(-0.1 * np.arange(40)) + [-4.0] * 40
        n = first_equilibrium(_trace(energies), self.config)
        assert n is not None and n >= 60 and (n - 20) % 5 == 0
        assert first_equilibrium(_trace(energies), self.config, limit=50) is None


def test_config_validation():
    with pytest.raises(ConfigError):
        SimulationConfig(n_fit=1)
    with pytest.raises(ConfigError):
        SimulationConfig(n_fit=20, n_f=5, max_sweeps=10)
    with pytest.raises(ConfigError):
        SimulationConfig(m_avg=0)
    with pytest.raises(ConfigError):
        SimulationConfig(relative_slope_tolerance=-1e-4)


def test_block_mean_initialization():
    angles = AngleField([[math.pi / 2, 0.0, 3 * math.pi / 2]], [[True, False, True]])
    initialize_angles(angles, strategy=InitStrategy.BLOCK_MEAN)
    assert angles.angles[0, 1] == pytest.approx(math.pi)


def test_block_mean_falls_back_to_global_mean():
    fixed = np.zeros((4, 4), dtype=bool)
    fixed[0, 0] = fixed[1, 1] = True
    values = np.zeros((4, 4))
    values[0, 0], values[1, 1] = 1.0, 3.0
    angles = initialize_angles(AngleField(values, fixed), make_blocks((4, 4), 2), InitStrategy.BLOCK_MEAN)
    assert angles.angles[0, 1] == pytest.approx(2.0)
    assert angles.angles[3, 3] == pytest.approx(2.0)


def test_random_initialization_keeps_fixed_sites():
    fixed = np.eye(5, dtype=bool)
    angles = initialize_angles(AngleField(np.ones((5, 5)), fixed), seed=9)
    assert np.all(angles.angles[fixed] == 1.0)
    assert np.all((angles.angles >= 0) & (angles.angles < 2 * math.pi))
    with pytest.raises(NoSamplesError):
        initialize_angles(AngleField(np.zeros((2, 2)), np.zeros((2, 2), dtype=bool)))


def test_sweep_without_free_sites():
    angles = AngleField(np.ones((3, 3)), np.ones((3, 3), dtype=bool))
    _, ratio = metropolis_sweep(angles, TemperatureField.uniform((3, 3), 0.1), PARAMS, 0, seed=1)
    assert ratio == 1.0
    assert np.all(angles.angles == 1.0)


def test_hot_grid_accepts_almost_everything():
    angles = AngleField(np.zeros((10, 10)), np.zeros((10, 10), dtype=bool))
    _, ratio = metropolis_sweep(angles, TemperatureField.uniform((10, 10), 1e6), PARAMS, 0, seed=2)
    assert ratio > 0.99


def test_quench_relaxes_single_free_site():
    fixed = np.ones((3, 3), dtype=bool)
    fixed[1, 1] = False
    angles = AngleField(np.full((3, 3), math.pi), fixed)
    angles.angles[1, 1] = 0.0
    temps = TemperatureField.uniform((3, 3), 0.0)
    with CheckerboardSampler(angles, temps, PARAMS, seed=4) as sampler:
        for i in range(300):
            sampler.sweep(i)
    assert angles.angles[1, 1] == pytest.approx(math.pi, abs=0.2)
    assert np.all(angles.angles[fixed] == math.pi)


def test_sweep_is_independent_of_thread_count():
    rng = np.random.default_rng(0)
    fixed = rng.random((17, 13)) > 0.4
    start = rng.uniform(0, 2 * math.pi, size=(17, 13))
    temps = TemperatureField(rng.uniform(0.01, 0.5, size=(17, 13)))
    results = []
    for threads in (1, 3, 8):
        angles = AngleField(start.copy(), fixed)
        with CheckerboardSampler(angles, temps, PARAMS, seed=21, threads=threads) as sampler:
            ratios = [sampler.sweep(i) for i in range(5)]
        results.append((angles.angles, ratios))
    for angles, ratios in results[1:]:
        np.testing.assert_array_equal(angles, results[0][0])
        assert ratios == results[0][1]


def test_conditional_simulation_preserves_samples(smooth_grid):
    temps = TemperatureField.uniform(smooth_grid.shape, 0.05)
    result = run_conditional_simulation(smooth_grid, temps, PARAMS, FAST)
    out = result.grid
    assert out.is_complete()
    np.testing.assert_array_equal(out.filled(0.0)[smooth_grid.mask], smooth_grid.sample_values())
    samples = smooth_grid.sample_values()
    assert out.to_array().min() >= samples.min()
    assert out.to_array().max() <= samples.max()
    diag = result.diagnostics
    assert len(result.trace) == diag.total_sweeps == diag.sweeps_to_equilibrium + FAST.m_avg
    assert diag.n_free == smooth_grid.n_missing


def test_conditional_simulation_is_reproducible(smooth_grid):
    temps = TemperatureField.uniform(smooth_grid.shape, 0.05)
    first = run_conditional_simulation(smooth_grid, temps, PARAMS, FAST)
    threaded = SimulationConfig(n_fit=10, n_f=5, max_sweeps=60, m_avg=10, seed=5, threads=4)
    second = run_conditional_simulation(smooth_grid, temps, PARAMS, threaded)
    assert first.grid == second.grid
    assert first.trace.energies == second.trace.energies


def test_complete_grid_is_returned_unchanged(full_grid):
    temps = TemperatureField.uniform(full_grid.shape, 0.1)
    result = run_conditional_simulation(full_grid, temps, PARAMS, FAST)
    assert result.grid == full_grid
    assert len(result.trace) == 0


def test_degenerate_range_fills_constant():
    grid = GridField([[2.0, 2.0], [2.0, 0.0]], [[True, True], [True, False]])
    result = run_conditional_simulation(grid, TemperatureField.uniform((2, 2), 0.1), PARAMS, FAST)
    assert result.diagnostics.degenerate_range
    assert result.grid.value_at((1, 1)) == 2.0


def test_temperature_shape_mismatch(smooth_grid):
    with pytest.raises(ConfigError):
        run_conditional_simulation(smooth_grid, TemperatureField.uniform((3, 3), 0.1), PARAMS, FAST)


def test_unconditional_simulation():
    trace = run_unconditional_simulation((12, 12), 50.0, PARAMS, sweeps=30, seed=3)
    assert len(trace) == 30
    assert trace.energies == run_unconditional_simulation((12, 12), 50.0, PARAMS, sweeps=30, seed=3).energies
    assert np.mean(trace.energies[10:]) == pytest.approx(independent_angle_energy(0.5), abs=0.1)


@pytest.mark.slow
def test_cold_unconditional_run_orders():
    trace = run_unconditional_simulation((24, 24), 0.01, PARAMS, sweeps=400, seed=8)
    assert np.mean(trace.energies[-50:]) < -0.9


@pytest.mark.slow
def test_low_temperature_beats_sample_mean(smooth_grid):
    rows, cols = np.indices((16, 16))
    truth = 10.0 * np.sin(rows / 5.0) + cols * 0.5
    config = SimulationConfig(n_fit=20, n_f=5, max_sweeps=300, m_avg=100, seed=1)
    result = run_conditional_simulation(smooth_grid, TemperatureField.uniform((16, 16), 0.01), PARAMS, config)
    missing = ~smooth_grid.mask
    mpr_error = np.mean(np.abs(result.grid.to_array()[missing] - truth[missing]))
    mean_error = np.mean(np.abs(smooth_grid.sample_values().mean() - truth[missing]))
    assert mpr_error < mean_error


def _sequential_metropolis(shape, temperature, sweeps, seed):
    """Single-site Metropolis in random site order, one site at a time."""
    rng = np.random.default_rng(seed)
    height, width = shape
    angles = rng.uniform(0, 2 * math.pi, size=shape)
    sites = [divmod(s, width) for s in range(height * width)]
    nbs = [[(r, c) for r, c in ((row - 1, col), (row + 1, col), (row, col - 1), (row, col + 1))
            if 0 <= r < height and 0 <= c < width] for row, col in sites]
    energies = np.empty(sweeps)
    for sweep in range(sweeps):
        order = rng.permutation(len(sites))
        proposals = rng.uniform(0, 2 * math.pi, size=len(sites))
        uniforms = rng.random(len(sites))
        for k, site in enumerate(order):
            row, col = sites[site]
            old, new = angles[row, col], proposals[k]
            delta = sum(math.cos(0.5 * (old - angles[n])) - math.cos(0.5 * (new - angles[n])) for n in nbs[site])
            if delta <= 0 or uniforms[k] < math.exp(-delta / temperature):
                angles[row, col] = new
        energies[sweep] = grid_specific_energy(AngleField(angles, np.zeros(shape, dtype=bool)), PARAMS)
    return energies


def _mean_and_stderr(values, n_batches=10):
    means = np.array([b.mean() for b in np.array_split(values, n_batches)])
    return values.mean(), means.std(ddof=1) / math.sqrt(n_batches)


@pytest.mark.slow
def test_checkerboard_matches_sequential_oracle():
    shape, temperature, sweeps = (8, 8), 0.5, 100_000
    checkerboard = np.array(run_unconditional_simulation(shape, temperature, PARAMS, sweeps, seed=17).energies)
    oracle = _sequential_metropolis(shape, temperature, sweeps, seed=18)
    m1, s1 = _mean_and_stderr(checkerboard[1000:])
    m2, s2 = _mean_and_stderr(oracle[1000:])
    assert abs(m1 - m2) <= 3 * math.hypot(s1, s2)


def test_slope_tolerance_scales_with_energy_drop():
    drift = -3e-6 * np.arange(20)
    assert not slope_test(drift)
    assert slope_test(drift, energy_scale=0.5)
    assert not slope_test(drift, energy_scale=0.5, relative_tolerance=1e-6)
    assert not slope_test(-0.01 * np.arange(20), energy_scale=1.0)
    assert not slope_test(drift, slope_tolerance=1e-7, energy_scale=0.5)


def test_single_sample_is_rejected():
    grid = GridField([[1.0, 0.0], [0.0, 0.0]], [[True, False], [False, False]])
    with pytest.raises(NoSamplesError):
        run_conditional_simulation(grid, TemperatureField.uniform((2, 2), 0.1), PARAMS, FAST)


def test_unconditional_simulation_from_start_state():
    ordered = AngleField(np.zeros((10, 10)), np.zeros((10, 10), dtype=bool))
    trace = run_unconditional_simulation((10, 10), 1e-6, PARAMS, sweeps=20, seed=2, angles=ordered)
    assert max(trace.energies) < -1.0 + 1e-3
    assert np.all(np.cos(0.5 * ordered.angles) > 0.99)
    with pytest.raises(ConfigError):
        run_unconditional_simulation((4, 4), 0.1, PARAMS, sweeps=5, seed=2, angles=ordered)


@pytest.mark.slow
def test_quench_aligns_isolated_sites_within_fifty_sweeps():
    # 400 FREE sites at odd (row, col), each surrounded by FIXED sites at pi
    fixed = np.ones((41, 41), dtype=bool)
    fixed[1::2, 1::2] = False
    angles = AngleField(np.full((41, 41), math.pi), fixed)
    angles.angles[~fixed] = 0.0
    with CheckerboardSampler(angles, TemperatureField.uniform((41, 41), 1e-9), PARAMS, seed=6) as sampler:
        for i in range(50):
            sampler.sweep(i)
    distance = np.abs(angles.angles[~fixed] - math.pi)
    # Per site P(distance > 0.05) = (1 - 0.05 / pi) ** 50, about 0.45
    assert np.mean(distance <= 0.05) > 0.4
    assert np.mean(distance) < 0.1
    assert np.all(angles.angles[fixed] == math.pi)
