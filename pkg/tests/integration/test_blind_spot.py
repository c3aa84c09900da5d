"""Refractive power trace misses harmonic aberrations the blur proxy sees."""
import numpy as np
import pytest

from windscreen_optics.domain.entities.zernike import DiskGrid, ZernikeCoefficients
from windscreen_optics.services.wavefront import blur_ellipse_proxy, laplace_trace
from windscreen_optics.services.zernike import synthesize

HARMONIC = (3, 5, 6, 9)
# 1e-3 mdpt
TRACE_BOUND = 1e-6


class TestHarmonicWavefronts:
    @pytest.mark.parametrize("seed", range(20))
    def test_zero_trace_nonzero_blur(self, seed):
        # Setup
        rng = np.random.default_rng(seed)
        grid = DiskGrid(size=65, aperture_radius=0.05)
        # 50 mdpt of astigmatic power corresponds to c = D R^2 / (2 sqrt(6))
        amplitude = 0.05 * grid.aperture_radius**2 / (2.0 * np.sqrt(6.0))
        c = ZernikeCoefficients.from_mapping(
            {
                index: amplitude * rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 1.0)
                for index in HARMONIC
            }
        )
        w = synthesize(c, grid)

        # Execute
        trace = laplace_trace(w)
        proxy = blur_ellipse_proxy(w)

        # Assert
        assert trace.valid_max_abs() < TRACE_BOUND
        assert proxy.valid_max_abs() > 1e3 * TRACE_BOUND
