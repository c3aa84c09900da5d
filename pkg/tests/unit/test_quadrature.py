"""Unit tests for disk quadrature."""
import numpy as np
import pytest

from windscreen_optics.domain.exceptions import AccuracyError
from windscreen_optics.services.quadrature import (
    DiskQuadrature,
    gauss_legendre,
    integrate_checked,
)


class TestGaussLegendre:
    def test_polynomial_exact(self):
        # Setup
        nodes, weights = gauss_legendre(4, 0.0, 2.0)

        # Execute
        value = np.sum(weights * nodes**5)

        # Assert
        assert value == pytest.approx(64.0 / 6.0, rel=1e-13)

    def test_nodes_are_cached_and_frozen(self):
        # Execute
        first = gauss_legendre(16)
        second = gauss_legendre(16)

        # Assert
        assert first is second
        with pytest.raises(ValueError):
            first[0][0] = 0.0


class TestDiskQuadrature:
    """Tests for the disk integration rule."""

    def test_area(self):
        # Execute
        area = DiskQuadrature().integrate(lambda x, y: np.ones_like(x))

        # Assert
        assert area == pytest.approx(np.pi, rel=1e-13)

    def test_second_moment(self):
        # Execute
        value = integrate_checked(lambda x, y: x * x + y * y)

        # Assert
        assert value == pytest.approx(np.pi / 2.0, rel=1e-12)

    def test_coarse_rule_halves_nodes(self):
        # Execute
        coarse = DiskQuadrature(radial_nodes=64, azimuthal_nodes=128).coarse()

        # Assert
        assert (coarse.radial_nodes, coarse.azimuthal_nodes) == (32, 64)

    def test_oscillating_integrand_is_rejected(self):
        """Test that a rule too coarse for the integrand raises instead of guessing."""
        # Execute / Assert
        with pytest.raises(AccuracyError) as error:
            integrate_checked(lambda x, y: np.cos(200.0 * x))
        assert error.value.residual > 0.0
        assert error.value.exit_code == 3
