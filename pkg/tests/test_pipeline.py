from dataclasses import replace

import numpy as np
import pytest

from mpr_gapfill.config import Method
from mpr_gapfill.exceptions import NoSampleBondsError, NoSamplesError
from mpr_gapfill.grid import GridField
from mpr_gapfill.pipeline import GapFiller


def _assert_valid_fill(original, filled):
    assert filled.is_complete()
    np.testing.assert_array_equal(filled.filled(0.0)[original.mask], original.sample_values())
    samples = original.sample_values()
    assert filled.to_array().min() >= samples.min()
    assert filled.to_array().max() <= samples.max()


@pytest.fixture
def checkerboard_grid():
    rows, cols = np.indices((6, 6))
    return GridField(rows + 0.5 * cols, (rows + cols) % 2 == 0)


def test_mpr_uses_global_temperature(smooth_grid, fast_config, analytic_curve):
    result = GapFiller(fast_config, curve=analytic_curve).fill(smooth_grid, Method.MPR)
    _assert_valid_fill(smooth_grid, result.grid)
    assert result.temperatures.provenance.kind == 'uniform'
    assert np.all(result.temperatures.values == result.global_temperature.temperature)
    assert result.diagnostics['sample_bonds'] > 0
    assert result.block_stats is None
    assert len(result.trace) == result.diagnostics['total_sweeps']


def test_bst_temperatures_follow_blocks(smooth_grid, fast_config, analytic_curve):
    result = GapFiller(fast_config, curve=analytic_curve).fill(smooth_grid, Method.SVMPR_BST)
    _assert_valid_fill(smooth_grid, result.grid)
    field = result.temperatures.values
    assert result.temperatures.provenance.label() == "BST(8)"
    assert np.all(field[:8, :8] == field[0, 0])
    assert result.diagnostics['blocks']['n_blocks'] == 4


def test_sst_smooths_block_field(smooth_grid, fast_config, analytic_curve):
    filler = GapFiller(fast_config, curve=analytic_curve)
    bst = filler.fill(smooth_grid, Method.SVMPR_BST)
    sst = filler.fill(smooth_grid, Method.SVMPR_SST)
    _assert_valid_fill(smooth_grid, sst.grid)
    assert sst.temperatures.provenance.smoothing_radius == 2.0
    assert sst.temperatures.values.min() >= bst.temperatures.values.min()
    assert sst.temperatures.values.max() <= bst.temperatures.values.max()


def test_block_size_override(smooth_grid, fast_config, analytic_curve):
    result = GapFiller(fast_config, curve=analytic_curve).fill(smooth_grid, Method.SVMPR_BST, block_size=4)
    assert result.block_stats.decomposition.n_blocks == 16


def test_idw_needs_no_curve(smooth_grid, fast_config):
    filler = GapFiller(fast_config)
    result = filler.fill(smooth_grid, Method.IDW, radius=3)
    _assert_valid_fill(smooth_grid, result.grid)
    assert filler._curve is None
    assert 'fallback_count' in result.diagnostics


def test_fill_is_reproducible(smooth_grid, fast_config, analytic_curve):
    first = GapFiller(fast_config, curve=analytic_curve).fill(smooth_grid, seed=11)
    threaded = replace(fast_config, threads=3)
    second = GapFiller(threaded, curve=analytic_curve).fill(smooth_grid, seed=11)
    assert first.grid == second.grid


def test_complete_grid_passes_through(full_grid, fast_config, analytic_curve):
    result = GapFiller(fast_config, curve=analytic_curve).fill(full_grid, Method.SVMPR_SST)
    assert result.grid == full_grid


def test_no_sample_bonds(checkerboard_grid, fast_config, analytic_curve):
    filler = GapFiller(fast_config, curve=analytic_curve)
    with pytest.raises(NoSampleBondsError):
        filler.fill(checkerboard_grid, Method.MPR)
    with pytest.raises(NoSampleBondsError):
        filler.fill(checkerboard_grid, Method.SVMPR_BST)

    fallback = GapFiller(replace(fast_config, fallback_temperature=0.05), curve=analytic_curve)
    result = fallback.fill(checkerboard_grid, Method.MPR)
    assert result.global_temperature.temperature == 0.05
    _assert_valid_fill(checkerboard_grid, result.grid)
    bst = fallback.fill(checkerboard_grid, Method.SVMPR_BST)
    assert bst.block_stats.all_empty
    assert np.all(bst.temperatures.values == 0.05)


def test_curve_is_built_once_and_cached(smooth_grid, fast_config):
    filler = GapFiller(fast_config, progress=False)
    filler.fill(smooth_grid, Method.MPR)
    curve = filler.curve
    assert len(curve) == fast_config.cal_points
    again = GapFiller(fast_config, progress=False)
    assert again.curve == curve


def test_single_block_bst_matches_mpr_temperature(smooth_grid, fast_config, analytic_curve):
    filler = GapFiller(replace(fast_config, block_size=16), curve=analytic_curve)
    mpr = filler.fill(smooth_grid, Method.MPR)
    bst = filler.fill(smooth_grid, Method.SVMPR_BST)
    assert bst.block_stats.decomposition.n_blocks == 1
    np.testing.assert_allclose(bst.temperatures.values, mpr.global_temperature.temperature, rtol=1e-9)


def test_sst_pass_override(smooth_grid, fast_config, analytic_curve):
    filler = GapFiller(fast_config, curve=analytic_curve)
    bst = filler.fill(smooth_grid, Method.SVMPR_BST)
    unsmoothed = filler.fill(smooth_grid, Method.SVMPR_SST, smoothing_passes=0)
    assert unsmoothed.temperatures.provenance.smoothing_passes == 0
    np.testing.assert_array_equal(unsmoothed.temperatures.values, bst.temperatures.values)
    assert unsmoothed.grid == bst.grid
    default = filler.fill(smooth_grid, Method.SVMPR_SST)
    assert default.temperatures.provenance.smoothing_passes == fast_config.smoothing_passes


@pytest.mark.parametrize("method", list(Method))
def test_needs_two_samples(fast_config, analytic_curve, method):
    mask = np.zeros((3, 3), dtype=bool)
    mask[0, 0] = True
    grid = GridField(np.zeros((3, 3)), mask)
    with pytest.raises(NoSamplesError):
        GapFiller(fast_config, curve=analytic_curve).fill(grid, method)
