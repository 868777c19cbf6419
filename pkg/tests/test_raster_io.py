import numpy as np
import pytest
from PIL import Image

from mpr_gapfill.exceptions import ConfigError, RasterFormatError, RasterIOError
from mpr_gapfill.grid import GridField, TemperatureField
from mpr_gapfill.raster import choose_nodata, emit_heatmap, load_raster, read_raster, write_raster, write_trace
from mpr_gapfill.simulation import EnergyTrace


def _write(tmp_path, text, name='grid.asc'):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_nodata_cells_become_missing(tmp_path):
    path = _write(tmp_path, "ncols 2\nnrows 2\nNODATA_value -9999\n1.5 -9999\n3 4\n")
    grid = load_raster(path)
    assert grid.shape == (2, 2)
    assert grid.n_missing == 1
    assert not grid.mask[0, 1]
    assert grid.value_at((1, 0)) == 3.0


def test_georeference_keys_are_ignored(tmp_path):
    path = _write(tmp_path, "ncols 3\nnrows 1\nxllcorner 10.0\nyllcorner 20.0\ncellsize 1.0\n"
                            "NODATA_value -9999\n1 2 3\n")
    raster = read_raster(path)
    assert raster.nodata == -9999.0
    assert raster.values.tolist() == [[1.0, 2.0, 3.0]]


def test_values_may_wrap_lines(tmp_path):
    path = _write(tmp_path, "ncols 3\nnrows 2\n1 2\n3 4\n5 6\n")
    assert load_raster(path).to_array().tolist() == [[1, 2, 3], [4, 5, 6]]


def test_canonical_rewrite_is_byte_identical(tmp_path):
    grid = GridField([[0.1, 1e-17, -3.25], [2.0 / 3.0, 0.0, 7.0]], [[True, True, True], [True, False, True]])
    first = str(tmp_path / 'a.asc')
    second = str(tmp_path / 'b.asc')
    write_raster(grid, first)
    loaded = load_raster(first)
    assert loaded == grid
    write_raster(loaded, second)
    assert open(first, 'rb').read() == open(second, 'rb').read()


def test_temperature_field_is_written_complete(tmp_path):
    path = str(tmp_path / 't.asc')
    write_raster(TemperatureField.uniform((2, 3), 0.125), path)
    grid = load_raster(path)
    assert grid.is_complete()
    assert np.all(grid.to_array() == 0.125)


def test_sentinel_moves_below_data():
    assert choose_nodata(np.array([1.0, 2.0])) == -9999.0
    assert choose_nodata(np.array([-9999.5, 0.0])) == -99999.0
    assert choose_nodata(np.array([])) == -9999.0


def test_no_finite_sentinel_below_data(tmp_path):
    with pytest.raises(RasterFormatError) as info:
        choose_nodata(np.array([-1.7e308, 0.0]))
    assert info.value.error_class == "RASTER_SENTINEL"
    path = str(tmp_path / 'extreme.asc')
    with pytest.raises(RasterFormatError) as info:
        write_raster(GridField([[-1.7e308, 1.0]], [[True, True]]), path)
    assert info.value.path == path
    assert choose_nodata(np.array([-5e15])) < -5e15


@pytest.mark.parametrize("text, error_class, line", [
    ("ncols 2\nnrows 2\n1 2\n3\n", "RASTER_COUNT", 4),
    ("ncols 2\nnrows 1\n1 abc\n", "RASTER_VALUE", 3),
    ("ncols 2\nnrows 1\n1 nan\n", "RASTER_VALUE", 3),
    ("nrows 1\n1 2\n", "RASTER_HEADER", 1),
    ("ncols two\nnrows 1\n1 2\n", "RASTER_HEADER", 1),
    ("ncols 2\nnrows 2 3\n1 2\n", "RASTER_HEADER", 2),
    ("ncols 2\nnrows 2\nNODATA_value -9999\n-10000 -9999\n5 6\n", "RASTER_SENTINEL", 3),
])
def test_format_errors(tmp_path, text, error_class, line):
    with pytest.raises(RasterFormatError) as info:
        read_raster(_write(tmp_path, text))
    assert info.value.error_class == error_class
    assert info.value.line == line


def test_missing_file(tmp_path):
    with pytest.raises(RasterIOError) as info:
        load_raster(str(tmp_path / 'nope.asc'))
    assert info.value.error_class == "IO_NOT_FOUND"


def test_trace_file(tmp_path):
    trace = EnergyTrace()
    trace.append(-0.5, 0.25)
    trace.append(-0.75, 0.125)
    path = tmp_path / 'trace.csv'
    write_trace(trace, str(path), sample_energy=-0.8)
    assert path.read_text().splitlines() == ["# sample_energy -0.8", "sweep,energy,acceptance",
                                             "1,-0.5,0.25", "2,-0.75,0.125"]


class TestHeatmap:
    def test_gray_levels(self, tmp_path):
        grid = GridField([[0.0, 1.0], [2.0, 0.0]], [[True, True], [True, False]])
        path = str(tmp_path / 'g.pgm')
        emit_heatmap(grid, path, scale='gray')
        pixels = np.asarray(Image.open(path))
        assert pixels.tolist() == [[1, 128], [255, 0]]

    def test_heat_ramp_and_missing_color(self, tmp_path):
        grid = GridField([[0.0, 3.0], [1.0, 0.0]], [[True, True], [True, False]])
        path = str(tmp_path / 'h.ppm')
        emit_heatmap(grid, path)
        pixels = np.asarray(Image.open(path).convert('RGB'))
        assert pixels[0, 0].tolist() == [0, 0, 0]
        assert pixels[0, 1].tolist() == [255, 255, 255]
        assert pixels[1, 0].tolist() == [255, 0, 0]
        assert pixels[1, 1].tolist() == [0, 0, 255]

    def test_clip_saturates_top(self, tmp_path):
        grid = GridField([[0.0, 1.0, 2.0, 100.0]])
        path = str(tmp_path / 'c.pgm')
        emit_heatmap(grid, path, scale='gray', clip_percentile=50)
        pixels = np.asarray(Image.open(path))
        assert pixels[0, 0] == 1
        assert pixels[0, 2] == 255 and pixels[0, 3] == 255

    def test_invalid_options(self, tmp_path):
        grid = GridField([[0.0, 1.0]])
        with pytest.raises(ConfigError):
            emit_heatmap(grid, str(tmp_path / 'x.ppm'), scale='rainbow')
        with pytest.raises(ConfigError):
            emit_heatmap(grid, str(tmp_path / 'x.ppm'), clip_percentile=0)
