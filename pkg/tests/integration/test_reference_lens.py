"""Reference-lens measurement through sub-aperture Shack-Hartmann stitching."""
import numpy as np
import pytest

from windscreen_optics.domain.entities.enums import PowerAxis
from windscreen_optics.domain.entities.zernike import DiskGrid
from windscreen_optics.services.stitching import (
    grid_windows,
    measure_subapertures,
    stitch,
)
from windscreen_optics.services.wavefront import refractive_power
from windscreen_optics.services.zernike import project

REFERENCE_POWER = 0.1003
APERTURE_RADIUS = 0.05
TOLERANCE = 1e-3


@pytest.fixture(scope="module")
def global_grid() -> DiskGrid:
    return DiskGrid(size=121, aperture_radius=APERTURE_RADIUS)


def measured_power(w_func, grid: DiskGrid):
    """Simulate 15 noisy sub-aperture measurements, stitch them and take D_x, D_y."""
    c = project(w_func, 5)
    windows = grid_windows(grid.size, (49, 49), (3, 5))
    tiles = measure_subapertures(c, grid, windows, noise_sigma=0.1e-6, seed=7)
    stitched = stitch(tiles).map
    x, y = stitched.mesh()
    interior = x * x + y * y <= 0.8**2
    powers = []
    for axis in (PowerAxis.X, PowerAxis.Y):
        values = refractive_power(stitched, axis).values
        valid = interior & np.isfinite(values)
        powers.append(float(np.mean(values[valid])))
    return len(tiles), powers


class TestReferenceLens:
    """Tests for the 100.3 mdpt reference lens measured through stitching."""

    def test_spherical_lens(self, global_grid):
        # Setup
        scale = 0.5 * REFERENCE_POWER * APERTURE_RADIUS**2

        # Execute
        count, (d_x, d_y) = measured_power(
            lambda x, y: scale * (x * x + y * y), global_grid
        )

        # Assert
        assert count == 15
        assert d_x == pytest.approx(REFERENCE_POWER, abs=TOLERANCE)
        assert d_y == pytest.approx(REFERENCE_POWER, abs=TOLERANCE)

    def test_cylindrical_lens(self, global_grid):
        # Setup
        scale = 0.5 * REFERENCE_POWER * APERTURE_RADIUS**2

        # Execute
        _, (d_x, d_y) = measured_power(lambda x, y: scale * x * x, global_grid)

        # Assert
        assert d_x == pytest.approx(REFERENCE_POWER, abs=TOLERANCE)
        assert d_y == pytest.approx(0.0, abs=TOLERANCE)
