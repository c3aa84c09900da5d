"""Unit tests for sub-aperture stitching."""
import numpy as np
import pytest

from windscreen_optics.domain.entities.wavefront import SubAperture, WavefrontMap
from windscreen_optics.domain.entities.zernike import DiskGrid, ZernikeCoefficients
from windscreen_optics.domain.exceptions import InputError, StitchingError
from windscreen_optics.services.stitching import (
    grid_windows,
    measure_subapertures,
    stitch,
)
from windscreen_optics.services.zernike import synthesize


def _tile(w: WavefrontMap, row0: int, col0: int, rows: int, cols: int, extra=None):
    """Cut a window out of a global map, optionally adding piston and tilt."""
    values = np.array(w.values[row0 : row0 + rows, col0 : col0 + cols])
    xs = w.x[col0 : col0 + cols]
    ys = w.y[row0 : row0 + rows]
    if extra is not None:
        p, tx, ty = extra
        x, y = np.meshgrid(xs, ys)
        values = values + p + tx * x + ty * y
    return SubAperture(
        map=WavefrontMap(values=values, x=xs, y=ys, aperture_radius=w.aperture_radius),
        offset=(row0, col0),
    )


@pytest.fixture
def global_map(grid, aberrated):
    return synthesize(aberrated, grid)


class TestStitch:
    """Tests for the piston and tilt solver."""

    def test_removes_piston_and_tilt(self, global_map):
        # Setup
        tiles = [
            _tile(global_map, 0, 0, 40, 40),
            _tile(global_map, 0, 25, 40, 40, extra=(1e-6, 2e-7, -3e-7)),
            _tile(global_map, 25, 0, 40, 40, extra=(-5e-7, 0.0, 1e-7)),
            _tile(global_map, 25, 25, 40, 40, extra=(2e-7, -1e-7, 0.0)),
        ]

        # Execute
        result = stitch(tiles)

        # Assert
        mask = global_map.mask
        np.testing.assert_allclose(
            result.map.values[mask], global_map.values[mask], atol=1e-15
        )
        assert result.residual_max < 1e-15
        assert result.corrections[0] == (0.0, 0.0, 0.0)
        assert result.corrections[1] == pytest.approx((-1e-6, -2e-7, 3e-7), abs=1e-15)

    def test_single_tile(self, global_map):
        # Execute
        result = stitch([_tile(global_map, 0, 0, 65, 65)])

        # Assert
        np.testing.assert_array_equal(
            np.isnan(result.map.values), np.isnan(global_map.values)
        )
        assert result.residual_rms == 0.0

    def test_disconnected_tiles(self, global_map):
        # Setup
        tiles = [_tile(global_map, 0, 0, 30, 65), _tile(global_map, 35, 0, 30, 65)]

        # Execute / Assert
        with pytest.raises(StitchingError) as error:
            stitch(tiles)
        assert error.value.details["disconnected_tiles"] == [1]

    def test_no_tiles(self):
        # Execute / Assert
        with pytest.raises(InputError):
            stitch([])


class TestSubApertureMeasurement:
    def test_windows_cover_grid(self):
        # Execute
        windows = grid_windows(121, (49, 33), (3, 5))

        # Assert
        assert len(windows) == 15
        assert windows[0] == (0, 0, 49, 33)
        assert windows[-1] == (72, 88, 49, 33)

    def test_stitched_quadratic_wavefront(self):
        """Test that noise-free sub-aperture fits stitch back to the global map."""
        # Setup
        grid = DiskGrid(size=121, aperture_radius=0.05)
        c = ZernikeCoefficients.from_mapping({3: -0.2e-6, 4: 1e-6, 5: 0.3e-6})
        windows = grid_windows(121, (49, 33), (3, 5))

        # Execute
        tiles = measure_subapertures(c, grid, windows, noise_sigma=0.0)
        result = stitch(tiles)

        # Assert
        truth = synthesize(c, grid)
        valid = np.isfinite(result.map.values) & truth.mask
        difference = result.map.values[valid] - truth.values[valid]
        assert np.ptp(difference) < 1e-11
        assert result.residual_max < 1e-11


class TestStitchOffsets:
    """Tests for tiles that do not touch the first grid row or column."""

    def test_bounding_box_of_offsets(self, grid):
        # Setup
        w = synthesize(ZernikeCoefficients.from_mapping({4: 1e-6}), grid)
        tiles = [
            _tile(w, 10, 10, 20, 20),
            _tile(w, 10, 20, 20, 20),
            _tile(w, 20, 10, 20, 20),
        ]

        # Execute
        result = stitch(tiles)

        # Assert
        assert result.map.shape == (30, 30)
        np.testing.assert_array_equal(result.map.x, w.x[10:40])
        np.testing.assert_array_equal(result.map.y, w.y[10:40])
        assert result.map.spacing == pytest.approx(w.spacing)
        covered = np.isfinite(result.map.values)
        assert not covered[25, 25]
        np.testing.assert_allclose(
            result.map.values[covered], w.values[10:40, 10:40][covered], atol=1e-15
        )
        assert covered[:20, :].all()
