"""Unit tests for the Zernike basis and decomposition."""
import numpy as np
import pytest

from windscreen_optics.domain.entities.zernike import (
    DiskGrid,
    DiskPoint,
    ZernikeCoefficients,
)
from windscreen_optics.domain.exceptions import (
    DiskDomainError,
    ResolutionError,
    UnsupportedOrderError,
)
from windscreen_optics.services.zernike import (
    HARMONIC_INDICES,
    basis_function,
    decompose,
    evaluate,
    evaluate_gradient,
    evaluate_polar,
    inner_product,
    is_harmonic,
    project,
    synthesize,
    zernike_gradients,
    zernike_values,
)

INDICES = range(10)


@pytest.fixture
def points():
    """Random points inside the unit disk."""
    rng = np.random.default_rng(7)
    rho = np.sqrt(rng.uniform(0.0, 1.0, 200))
    phi = rng.uniform(0.0, 2.0 * np.pi, 200)
    return rho, phi


class TestBasis:
    """Tests for closed-form evaluation."""

    @pytest.mark.parametrize("i", INDICES)
    @pytest.mark.parametrize("j", INDICES)
    def test_orthonormal(self, i, j):
        """Test <Z_i, Z_j> / pi is the identity."""
        # Execute
        value = inner_product(basis_function(i), basis_function(j)) / np.pi

        # Assert
        assert value == pytest.approx(1.0 if i == j else 0.0, abs=1e-9)

    @pytest.mark.parametrize("index", INDICES)
    def test_polar_matches_cartesian(self, index, points):
        # Setup
        rho, phi = points

        # Execute
        cartesian = zernike_values(index, rho * np.cos(phi), rho * np.sin(phi))
        polar = evaluate_polar(index, rho, phi)

        # Assert
        np.testing.assert_allclose(cartesian, polar, atol=1e-12)

    @pytest.mark.parametrize("index", INDICES)
    def test_gradient_matches_finite_difference(self, index, points):
        # Setup
        rho, phi = points
        x, y = 0.9 * rho * np.cos(phi), 0.9 * rho * np.sin(phi)
        h = 1e-6

        # Execute
        gx, gy = zernike_gradients(index, x, y)
        fd_x = (zernike_values(index, x + h, y) - zernike_values(index, x - h, y)) / (
            2 * h
        )
        fd_y = (zernike_values(index, x, y + h) - zernike_values(index, x, y - h)) / (
            2 * h
        )

        # Assert
        np.testing.assert_allclose(gx, fd_x, atol=1e-6)
        np.testing.assert_allclose(gy, fd_y, atol=1e-6)

    def test_known_values(self):
        # Setup
        centre = DiskPoint(x=0.0, y=0.0)
        rim = DiskPoint(x=1.0, y=0.0)

        # Execute / Assert
        assert evaluate(4, centre) == pytest.approx(-np.sqrt(3.0))
        assert evaluate(4, rim) == pytest.approx(np.sqrt(3.0))
        assert evaluate(9, rim) == pytest.approx(np.sqrt(8.0))
        assert evaluate(5, DiskPoint(x=0.0, y=1.0)) == pytest.approx(-np.sqrt(6.0))
        assert evaluate_gradient(2, centre) == (2.0, 0.0)

    def test_point_outside_disk(self):
        # Execute / Assert
        with pytest.raises(DiskDomainError):
            DiskPoint(x=0.8, y=0.8)
        with pytest.raises(DiskDomainError):
            zernike_values(4, np.array([1.1]), np.array([0.0]))

    @pytest.mark.parametrize("index", [-1, 10, 15])
    def test_unsupported_index(self, index):
        # Execute / Assert
        with pytest.raises(UnsupportedOrderError):
            evaluate(index, DiskPoint(x=0.1, y=0.1))

    def test_harmonic_set(self):
        """Test the harmonic indices are exactly those with zero Laplacian."""
        # Setup
        x, y, h = 0.3, -0.2, 1e-4

        for index in INDICES:
            # Execute
            f = basis_function(index)
            laplacian = (
                f(np.array(x + h), np.array(y))
                + f(np.array(x - h), np.array(y))
                + f(np.array(x), np.array(y + h))
                + f(np.array(x), np.array(y - h))
                - 4.0 * f(np.array(x), np.array(y))
            ) / h**2

            # Assert
            assert is_harmonic(index) == (abs(laplacian) < 1e-4)
        assert HARMONIC_INDICES == frozenset({0, 1, 2, 3, 5, 6, 9})


class TestCoefficients:
    """Tests for the coefficient vector entity."""

    def test_from_mapping(self):
        # Execute
        c = ZernikeCoefficients.from_mapping({4: 1e-6, 7: -2e-6})

        # Assert
        assert c.max_index == 7
        assert c.get(4) == 1e-6
        assert c.get(9) == 0.0
        assert c.nonzero() == [4, 7]

    def test_values_are_read_only(self):
        # Setup
        c = ZernikeCoefficients.zeros(5)

        # Execute / Assert
        with pytest.raises(ValueError):
            c.values[0] = 1.0

    def test_order_limit(self):
        # Execute / Assert
        with pytest.raises(UnsupportedOrderError):
            ZernikeCoefficients(values=np.zeros(11))

    def test_padded_and_with_value(self):
        # Setup
        c = ZernikeCoefficients.from_mapping({2: 3e-7})

        # Execute
        padded = c.padded(5)
        extended = c.with_value(8, 1e-7)

        # Assert
        assert padded.tolist() == [0.0, 0.0, 3e-7, 0.0, 0.0, 0.0]
        assert extended.max_index == 8
        assert extended.get(2) == 3e-7
        assert c.max_index == 2


class TestDecomposition:
    """Tests for projection and decomposition."""

    def test_decompose_recovers_coefficients(self, grid, aberrated):
        # Setup
        w = synthesize(aberrated, grid)

        # Execute
        c, residual = decompose(w, 9)

        # Assert
        np.testing.assert_allclose(c.values, aberrated.values, atol=1e-15)
        assert residual < 1e-15

    def test_decompose_ignores_invalid_samples(self, grid, aberrated):
        # Setup
        w = synthesize(aberrated, grid)
        values = np.array(w.values)
        values[:10, :] = np.nan

        # Execute
        c, _ = decompose(w.with_values(values), 9)

        # Assert
        np.testing.assert_allclose(c.values, aberrated.values, atol=1e-14)

    def test_decompose_lower_order_reports_residual(self, grid):
        # Setup
        c = ZernikeCoefficients.from_mapping({4: 1e-6, 9: 1e-7})
        w = synthesize(c, grid)

        # Execute
        fitted, residual = decompose(w, 5)

        # Assert
        assert fitted.get(4) == pytest.approx(1e-6, rel=1e-9)
        assert residual == pytest.approx(1e-7, rel=0.1)

    def test_decompose_requires_resolution(self):
        # Setup
        w = synthesize(ZernikeCoefficients.from_mapping({4: 1e-6}), DiskGrid(size=33))

        # Execute / Assert
        with pytest.raises(ResolutionError):
            decompose(w, 9)

    def test_project_analytic_function(self):
        # Setup
        f5, f7 = basis_function(5), basis_function(7)

        # Execute
        c = project(lambda x, y: 1e-6 * f5(x, y) + 2e-6 * f7(x, y), 9)

        # Assert
        expected = np.zeros(10)
        expected[5], expected[7] = 1e-6, 2e-6
        np.testing.assert_allclose(c.values, expected, atol=1e-15)
