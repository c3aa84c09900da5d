"""MTF from the shifted-pupil overlap integral and PSF synthesis."""
from typing import Optional

import numpy as np
from joblib import Parallel, delayed
from loguru import logger
from scipy.fft import fft2, fftshift

from windscreen_optics.config import settings
from windscreen_optics.domain.entities.enums import MTFMethod
from windscreen_optics.domain.entities.mtf import (
    MTFCurve,
    PSFGrid,
    PupilSpec,
    SpectralDensity,
    unit_vector,
)
from windscreen_optics.domain.entities.zernike import ZernikeCoefficients
from windscreen_optics.domain.exceptions import AccuracyError, AliasingError, InputError
from windscreen_optics.services.quadrature import DiskFunction, gauss_legendre
from windscreen_optics.services.zernike import wavefront_function


def cutoff_frequency(pupil: PupilSpec, wavelength: float) -> float:
    """Incoherent cutoff 2R / (lambda z) in cycles per meter."""
    return pupil.cutoff(wavelength)


def diffraction_limited_mtf(nu) -> np.ndarray:
    """Analytic MTF of an unaberrated circular pupil at normalized frequency nu."""
    nu = np.clip(np.abs(np.asarray(nu, dtype=float)), 0.0, 1.0)
    return (2.0 / np.pi) * (np.arccos(nu) - nu * np.sqrt(1.0 - nu * nu))


def cycles_per_degree(freq_cyc_per_mm, focal_length: float) -> np.ndarray:
    """Convert image-plane cycles/mm to object-space cycles/degree."""
    return np.asarray(freq_cyc_per_mm, dtype=float) * focal_length * 1e3 * np.pi / 180.0


class OverlapIntegrator:
    """Phasor integral over the intersection of two shifted unit disks.

    ``quadrature`` integrates the lens-shaped domain in chord coordinates
    with Gauss-Legendre nodes; ``raster`` sums over a cell-centred raster
    of the pupil. Both normalize by their own pupil area, so MTF(0) = 1.
    """

    def __init__(
        self,
        method: MTFMethod = MTFMethod(settings.MTF_METHOD),
        nodes: int = settings.MTF_OVERLAP_NODES,
        raster_samples: int = settings.MTF_RASTER_SAMPLES,
        tolerance: float = settings.MTF_TOLERANCE,
    ):
        """
        Initialize the integrator.

        Args:
            method: Quadrature or raster route
            nodes: Gauss-Legendre nodes per direction for the quadrature route
            raster_samples: Raster cells across the pupil diameter
            tolerance: Accepted disagreement with the half-node rule
        """
        self.method = MTFMethod(method)
        self.nodes = nodes
        self.raster_samples = raster_samples
        self.tolerance = tolerance
        self._area = {}

    def _chord_rule(self, delta: float, nodes: int):
        half_height = np.sqrt(max(1.0 - delta * delta, 0.0))
        theta, w_theta = gauss_legendre(nodes, -0.5 * np.pi, 0.5 * np.pi)
        sigma, w_sigma = gauss_legendre(nodes, -1.0, 1.0)
        t = half_height * np.sin(theta)
        half_chord = np.sqrt(1.0 - t * t) - delta
        s = half_chord[:, None] * sigma[None, :]
        weights = (w_theta * half_height * np.cos(theta) * half_chord)[
            :, None
        ] * w_sigma[None, :]
        return s.ravel(), np.broadcast_to(t[:, None], s.shape).ravel(), weights.ravel()

    def _quadrature(self, func, delta, u, k_phase, nodes):
        s, t, weights = self._chord_rule(delta, nodes)
        x = s * u[0] - t * u[1]
        y = s * u[1] + t * u[0]
        phase = k_phase * (
            func(x + delta * u[0], y + delta * u[1])
            - func(x - delta * u[0], y - delta * u[1])
        )
        return np.sum(weights * np.exp(1j * phase)), np.sum(weights)

    def _raster_points(self):
        n = self.raster_samples
        coords = (np.arange(n) + 0.5) * 2.0 / n - 1.0
        x, y = np.meshgrid(coords, coords)
        inside = x * x + y * y <= 1.0
        return x[inside], y[inside]

    def _raster(self, func, delta, u, k_phase):
        x, y = self._raster_points()
        xp, yp = x + delta * u[0], y + delta * u[1]
        xm, ym = x - delta * u[0], y - delta * u[1]
        # the sampled pupil itself is centred at (x, y); shifts keep the raster
        keep = (xp * xp + yp * yp <= 1.0) & (xm * xm + ym * ym <= 1.0)
        phase = k_phase * (func(xp[keep], yp[keep]) - func(xm[keep], ym[keep]))
        return np.sum(np.exp(1j * phase)), float(x.size)

    def pupil_area(self) -> float:
        """Area of the unshifted pupil under the integrator's own rule."""
        if self.method not in self._area:
            if self.method is MTFMethod.RASTER:
                self._area[self.method] = float(self._raster_points()[0].size)
            else:
                self._area[self.method] = float(
                    np.sum(self._chord_rule(0.0, self.nodes)[2])
                )
        return self._area[self.method]

    def modulus(self, func: DiskFunction, delta: float, u, k_phase: float) -> float:
        """
        Normalized modulus of the overlap phasor integral.

        Args:
            func: Wavefront in meters over normalized pupil coordinates
            delta: Normalized half shift |Delta| / R
            u: Unit shift direction
            k_phase: 2 pi / lambda

        Returns:
            MTF value in [0, 1]

        Raises:
            AccuracyError: If the quadrature disagrees with its half-node rule
        """
        if delta >= 1.0:
            return 0.0
        area = self.pupil_area()
        if self.method is MTFMethod.RASTER:
            value, _ = self._raster(func, delta, u, k_phase)
            return float(min(abs(value) / area, 1.0))

        value, _ = self._quadrature(func, delta, u, k_phase, self.nodes)
        if delta > 0.0:
            coarse, _ = self._quadrature(
                func, delta, u, k_phase, max(self.nodes // 2, 2)
            )
            residual = abs(value - coarse) / area
            if residual > self.tolerance:
                raise AccuracyError(
                    f"Overlap integral not converged at shift {delta:.4f} "
                    f"(residual estimate {residual:.3e}); increase the node count",
                    residual=float(residual),
                )
        return float(min(abs(value) / area, 1.0))


def mtf_mono(
    c: ZernikeCoefficients,
    pupil: PupilSpec,
    wavelength: float,
    frequencies: np.ndarray,
    orientation=(1.0, 0.0),
    integrator: Optional[OverlapIntegrator] = None,
) -> MTFCurve:
    """
    Monochromatic MTF from the shifted-pupil overlap integral.

    The pupil is shifted by +-Delta = +-lambda z k / 2 (normalized by R) and
    the phasor exp(2 pi i / lambda * [W(xi + Delta) - W(xi - Delta)]) is
    integrated over the overlap, then divided by the pupil area.

    Args:
        c: Wavefront coefficients in meters
        pupil: Aperture radius and aperture-to-image distance
        wavelength: Wavelength in meters
        frequencies: Image-plane frequencies in cycles per meter
        orientation: Angle in degrees or 2-vector of the frequency direction
        integrator: Overlap integrator, default settings integrator

    Returns:
        MTF curve
    """
    if wavelength <= 0.0:
        raise InputError(f"Wavelength must be positive, got {wavelength}")
    integrator = integrator or OverlapIntegrator()
    u = unit_vector(orientation)
    frequencies = np.asarray(frequencies, dtype=float)
    func = wavefront_function(c)
    k_phase = 2.0 * np.pi / wavelength
    scale = wavelength * pupil.distance / (2.0 * pupil.aperture_radius)

    values = np.array(
        [integrator.modulus(func, abs(k) * scale, u, k_phase) for k in frequencies]
    )
    logger.debug(
        f"MTF at {wavelength * 1e9:.1f} nm over {frequencies.size} frequencies, "
        f"cutoff {pupil.cutoff(wavelength) * 1e-3:.1f} cyc/mm"
    )
    return MTFCurve(
        frequencies=frequencies, values=values, orientation=u, wavelength=wavelength
    )


def mtf_poly(
    c: ZernikeCoefficients,
    pupil: PupilSpec,
    psd: SpectralDensity,
    frequencies: np.ndarray,
    orientation=(1.0, 0.0),
    integrator: Optional[OverlapIntegrator] = None,
    n_jobs: int = settings.N_JOBS,
) -> MTFCurve:
    """
    Polychromatic MTF as the PSD-weighted sum of monochromatic curves.

    Args:
        c: Wavefront coefficients in meters
        pupil: Pupil specification
        psd: Normalized spectral density
        frequencies: Image-plane frequencies in cycles per meter
        orientation: Frequency direction
        integrator: Overlap integrator
        n_jobs: joblib workers for the per-wavelength curves

    Returns:
        Weighted MTF curve without a single wavelength
    """
    curves = Parallel(n_jobs=n_jobs)(
        delayed(mtf_mono)(c, pupil, wavelength, frequencies, orientation, integrator)
        for wavelength in psd.wavelengths
    )
    values = np.zeros(len(frequencies))
    for weight, curve in zip(psd.weights, curves):
        values = values + weight * curve.values
    return MTFCurve(
        frequencies=frequencies,
        values=np.clip(values, 0.0, 1.0),
        orientation=unit_vector(orientation),
    )


def psf_from_pupil(
    c: ZernikeCoefficients,
    pupil: PupilSpec,
    wavelength: float,
    pupil_samples: int = settings.PSF_PUPIL_SAMPLES,
    padding: int = settings.PSF_PADDING,
) -> PSFGrid:
    """
    PSF as the squared modulus of the DFT of the zero-padded pupil phasor.

    Args:
        c: Wavefront coefficients in meters
        pupil: Pupil specification
        wavelength: Wavelength in meters
        pupil_samples: Raster cells across the pupil diameter
        padding: Grid size over pupil size, at least 4

    Returns:
        PSF grid with unit sum and its image-plane pitch

    Raises:
        AliasingError: If the padding factor is below 4
    """
    if padding < settings.PSF_MIN_PADDING:
        raise AliasingError(
            f"Padding {padding} is below the minimum {settings.PSF_MIN_PADDING}; "
            f"the PSF would wrap around"
        )
    coords = (np.arange(pupil_samples) + 0.5) * 2.0 / pupil_samples - 1.0
    x, y = np.meshgrid(coords, coords)
    inside = x * x + y * y <= 1.0
    phase = np.zeros_like(x)
    phase[inside] = 2.0 * np.pi / wavelength * wavefront_function(c)(x[inside], y[inside])

    size = padding * pupil_samples
    field = np.zeros((size, size), dtype=complex)
    start = (size - pupil_samples) // 2
    window = slice(start, start + pupil_samples)
    field[window, window] = np.where(inside, np.exp(1j * phase), 0.0)

    intensity = np.abs(fft2(field, workers=-1)) ** 2
    psf = fftshift(intensity) / np.sum(intensity)
    pitch = wavelength * pupil.distance * pupil_samples / (
        size * 2.0 * pupil.aperture_radius
    )
    return PSFGrid(
        values=psf,
        pixel_pitch=pitch,
        wavelength=wavelength,
        pupil_samples=pupil_samples,
        padding=padding,
    )
