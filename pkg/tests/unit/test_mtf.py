"""Unit tests for the overlap MTF and PSF synthesis."""
import numpy as np
import pytest

from windscreen_optics.domain.entities.enums import MTFMethod
from windscreen_optics.domain.entities.mtf import (
    PupilSpec,
    SpectralDensity,
    unit_vector,
)
from windscreen_optics.domain.entities.zernike import ZernikeCoefficients
from windscreen_optics.domain.exceptions import (
    AccuracyError,
    AliasingError,
    InputError,
)
from windscreen_optics.services.mtf import (
    OverlapIntegrator,
    cycles_per_degree,
    diffraction_limited_mtf,
    mtf_mono,
    mtf_poly,
    psf_from_pupil,
)

WAVELENGTH = 550e-9


@pytest.fixture
def frequencies(pupil):
    return np.linspace(0.0, pupil.cutoff(WAVELENGTH), 21)


class TestHelpers:
    def test_diffraction_limit(self):
        # Execute
        values = diffraction_limited_mtf([0.0, 0.5, 1.0, 1.5])

        # Assert
        np.testing.assert_allclose(values, [1.0, 0.391002, 0.0, 0.0], atol=1e-6)

    def test_cutoff(self, pupil):
        # Assert
        assert pupil.aperture_radius == pytest.approx(1.5e-3)
        assert pupil.cutoff(WAVELENGTH) == pytest.approx(1.0 / (WAVELENGTH * 2.0))

    def test_cycles_per_degree(self):
        # Execute
        value = cycles_per_degree(100.0, 6e-3)

        # Assert
        assert value == pytest.approx(100.0 * 6.0 * np.pi / 180.0)

    def test_unit_vector(self):
        # Assert
        assert unit_vector(90.0) == pytest.approx((0.0, 1.0), abs=1e-15)
        assert unit_vector((3.0, 4.0)) == pytest.approx((0.6, 0.8))
        with pytest.raises(InputError):
            unit_vector((0.0, 0.0))


class TestOverlapMTF:
    """Tests for the shifted-pupil overlap integral."""

    def test_unaberrated_matches_analytic(self, pupil):
        # Setup
        cutoff = pupil.cutoff(WAVELENGTH)
        frequencies = np.linspace(0.0, cutoff, 50)

        # Execute
        curve = mtf_mono(ZernikeCoefficients.zeros(9), pupil, WAVELENGTH, frequencies)
        half = mtf_mono(ZernikeCoefficients.zeros(4), pupil, WAVELENGTH, [0.5 * cutoff])

        # Assert
        expected = diffraction_limited_mtf(frequencies / cutoff)
        np.testing.assert_allclose(curve.values, expected, atol=1e-6)
        assert curve.values[0] == pytest.approx(1.0, abs=1e-14)
        assert curve.wavelength == WAVELENGTH
        assert half.values[0] == pytest.approx(0.391, abs=1e-3)

    def test_raster_route_matches_analytic(self, pupil, frequencies):
        # Setup
        integrator = OverlapIntegrator(method=MTFMethod.RASTER, raster_samples=512)

        # Execute
        curve = mtf_mono(
            ZernikeCoefficients.zeros(4),
            pupil,
            WAVELENGTH,
            frequencies,
            integrator=integrator,
        )

        # Assert
        expected = diffraction_limited_mtf(frequencies / pupil.cutoff(WAVELENGTH))
        np.testing.assert_allclose(curve.values, expected, atol=5e-3)

    def test_piston_and_tilt_do_not_change_mtf(self, pupil, frequencies):
        # Setup
        tilted = ZernikeCoefficients.from_mapping({0: 3e-6, 1: 2e-6, 2: -1e-6})

        # Execute
        reference = mtf_mono(ZernikeCoefficients.zeros(2), pupil, WAVELENGTH, frequencies)
        curve = mtf_mono(tilted, pupil, WAVELENGTH, frequencies)

        # Assert
        np.testing.assert_allclose(curve.values, reference.values, atol=1e-12)

    def test_defocus_sign_and_orientation(self, pupil, frequencies):
        # Setup
        plus = ZernikeCoefficients.from_mapping({4: 0.1e-6})
        minus = ZernikeCoefficients.from_mapping({4: -0.1e-6})

        # Execute
        horizontal = mtf_mono(plus, pupil, WAVELENGTH, frequencies, 0.0)
        vertical = mtf_mono(plus, pupil, WAVELENGTH, frequencies, 90.0)
        flipped = mtf_mono(minus, pupil, WAVELENGTH, frequencies, 0.0)

        # Assert
        np.testing.assert_allclose(horizontal.values, vertical.values, atol=1e-10)
        np.testing.assert_allclose(horizontal.values, flipped.values, atol=1e-12)

    def test_defocus_lowers_mtf(self, pupil, frequencies):
        # Setup
        values = []
        for c4 in (0.0, 0.02e-6, 0.05e-6, 0.08e-6):
            c = ZernikeCoefficients.from_mapping({4: c4})

            # Execute
            values.append(mtf_mono(c, pupil, WAVELENGTH, frequencies).values[5])

        # Assert
        assert values == sorted(values, reverse=True)
        assert values[0] - values[-1] > 0.1

    def test_beyond_cutoff_is_zero(self, pupil):
        # Execute
        curve = mtf_mono(
            ZernikeCoefficients.zeros(4),
            pupil,
            WAVELENGTH,
            [1.2 * pupil.cutoff(WAVELENGTH)],
        )

        # Assert
        assert curve.values[0] == 0.0

    def test_unconverged_quadrature_raises(self, pupil, frequencies):
        # Setup
        c = ZernikeCoefficients.from_mapping({4: 5e-6})
        integrator = OverlapIntegrator(nodes=8)

        # Execute / Assert
        with pytest.raises(AccuracyError):
            mtf_mono(c, pupil, WAVELENGTH, frequencies, integrator=integrator)

    def test_invalid_wavelength(self, pupil, frequencies):
        # Execute / Assert
        with pytest.raises(InputError):
            mtf_mono(ZernikeCoefficients.zeros(4), pupil, 0.0, frequencies)


class TestPolychromatic:
    def test_single_line_equals_monochromatic(self, pupil, frequencies, aberrated):
        # Setup
        psd = SpectralDensity.monochromatic(WAVELENGTH)

        # Execute
        poly = mtf_poly(aberrated, pupil, psd, frequencies)
        mono = mtf_mono(aberrated, pupil, WAVELENGTH, frequencies)

        # Assert
        np.testing.assert_allclose(poly.values, mono.values, atol=1e-15)
        assert poly.wavelength is None

    def test_weighted_sum(self, pupil, frequencies):
        # Setup
        c = ZernikeCoefficients.from_mapping({4: 0.1e-6})
        psd = SpectralDensity.from_lines([500e-9, 600e-9], [1.0, 3.0])

        # Execute
        poly = mtf_poly(c, pupil, psd, frequencies)

        # Assert
        first = mtf_mono(c, pupil, 500e-9, frequencies).values
        second = mtf_mono(c, pupil, 600e-9, frequencies).values
        np.testing.assert_allclose(poly.values, 0.25 * first + 0.75 * second)

    def test_density_must_be_normalized(self):
        # Execute / Assert
        with pytest.raises(InputError):
            SpectralDensity(wavelengths=[500e-9, 600e-9], weights=[0.5, 0.6])
        with pytest.raises(InputError):
            SpectralDensity.from_lines([500e-9], [-1.0])

    def test_continuous_density(self):
        # Execute
        psd = SpectralDensity.from_continuous([600e-9, 500e-9, 550e-9], [1.0, 1.0, 1.0])

        # Assert
        np.testing.assert_allclose(psd.wavelengths, [500e-9, 550e-9, 600e-9])
        np.testing.assert_allclose(psd.weights, [0.25, 0.5, 0.25])


class TestPSF:
    """Tests for the pupil-phasor PSF."""

    def test_normalization_and_peak(self, pupil):
        # Execute
        psf = psf_from_pupil(ZernikeCoefficients.zeros(4), pupil, WAVELENGTH, 64, 4)

        # Assert
        assert psf.size == 256
        assert np.sum(psf.values) == pytest.approx(1.0)
        assert np.unravel_index(np.argmax(psf.values), psf.values.shape) == (128, 128)
        assert psf.pixel_pitch == pytest.approx(WAVELENGTH * 2.0 / 4.0)

    def test_padding_below_four(self, pupil):
        # Execute / Assert
        with pytest.raises(AliasingError):
            psf_from_pupil(ZernikeCoefficients.zeros(4), pupil, WAVELENGTH, 64, 2)

    @pytest.mark.parametrize("orientation", [0.0, 90.0])
    def test_psf_route_matches_raster_route(self, pupil, aberrated, orientation):
        """Test both routes agree where raster shifts land on cell centres."""
        # Setup
        samples = 64
        cutoff = pupil.cutoff(WAVELENGTH)
        bins = np.arange(0, 40, 2)
        frequencies = bins / samples * cutoff
        integrator = OverlapIntegrator(method=MTFMethod.RASTER, raster_samples=samples)

        # Execute
        psf = psf_from_pupil(aberrated, pupil, WAVELENGTH, samples, 4)
        from_psf = psf.mtf_along(orientation, frequencies)
        from_raster = mtf_mono(
            aberrated, pupil, WAVELENGTH, frequencies, orientation, integrator
        )

        # Assert
        np.testing.assert_allclose(from_psf.values, from_raster.values, atol=1e-9)

    @pytest.mark.parametrize("seed", range(10))
    def test_psf_route_matches_quadrature(self, pupil, seed):
        """Test |DFT(PSF)| against the overlap quadrature for random wavefronts."""
        # Setup
        rng = np.random.default_rng(seed)
        direction = rng.normal(size=7)
        amplitude = rng.uniform(0.0, 0.5 * WAVELENGTH) / np.linalg.norm(direction)
        c = ZernikeCoefficients.from_mapping(
            {j: amplitude * a for j, a in zip(range(3, 10), direction)}, max_index=9
        )
        samples = 256
        frequencies = np.arange(0, 240, 6) / samples * pupil.cutoff(WAVELENGTH)

        # Execute
        psf = psf_from_pupil(c, pupil, WAVELENGTH, samples, 4)
        from_psf = psf.mtf_along(0.0, frequencies)
        from_overlap = mtf_mono(c, pupil, WAVELENGTH, frequencies, 0.0)

        # Assert
        np.testing.assert_allclose(from_psf.values, from_overlap.values, atol=1e-3)

    def test_pupil_spec_validation(self):
        # Execute / Assert
        with pytest.raises(ValueError):
            PupilSpec(aperture_radius=-1.0, distance=1.0)
