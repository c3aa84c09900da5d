"""Pupil, spectrum, MTF and PSF entities."""
from typing import Optional, Tuple

import numpy as np
from pydantic import Field, field_validator, model_validator
from scipy.fft import fft2, ifftshift
from scipy.ndimage import map_coordinates

from windscreen_optics.config import settings
from windscreen_optics.domain.entities.base import Entity, frozen_array
from windscreen_optics.domain.exceptions import InputError


def unit_vector(orientation) -> Tuple[float, float]:
    """Normalize an orientation given as an angle in degrees or a 2-vector."""
    if np.isscalar(orientation):
        angle = np.radians(float(orientation))
        return float(np.cos(angle)), float(np.sin(angle))
    vector = np.asarray(orientation, dtype=float)
    norm = float(np.hypot(*vector))
    if vector.shape != (2,) or norm == 0.0:
        raise InputError(f"Invalid orientation {orientation!r}")
    return float(vector[0] / norm), float(vector[1] / norm)


class PupilSpec(Entity):
    """Circular top-hat aperture stop."""

    aperture_radius: float = Field(gt=0)
    distance: float = Field(gt=0)

    @classmethod
    def from_lens(cls, focal_length: float, f_number: float) -> "PupilSpec":
        """Pupil of a lens with z = f and R = f / (2 N)."""
        return cls(aperture_radius=focal_length / (2.0 * f_number), distance=focal_length)

    def cutoff(self, wavelength: float) -> float:
        """Incoherent cutoff frequency 2R / (lambda z) in cycles per meter."""
        return 2.0 * self.aperture_radius / (wavelength * self.distance)


class SpectralDensity(Entity):
    """Discrete (wavelength, weight) samples with unit total weight."""

    wavelengths: np.ndarray
    weights: np.ndarray

    @field_validator("wavelengths", "weights", mode="before")
    @classmethod
    def one_dimensional(cls, v):
        return frozen_array(v, ndim=1)

    @model_validator(mode="after")
    def normalized(self):
        """Check positivity and unit normalization."""
        if self.wavelengths.size == 0:
            raise InputError("Spectral density has no samples")
        if self.wavelengths.shape != self.weights.shape:
            raise InputError("Wavelengths and weights differ in length")
        if np.any(self.wavelengths <= 0.0) or np.any(self.weights < 0.0):
            raise InputError("Wavelengths must be positive and weights non-negative")
        if abs(float(np.sum(self.weights)) - 1.0) > 1e-9:
            raise InputError(
                f"Spectral weights sum to {np.sum(self.weights):.12f}, expected 1"
            )
        return self

    @classmethod
    def from_lines(cls, wavelengths, weights=None) -> "SpectralDensity":
        """Normalize discrete spectral lines; equal weights by default."""
        wavelengths = np.asarray(wavelengths, dtype=float)
        if wavelengths.size == 0:
            raise InputError("Spectral density has no samples")
        weights = (
            np.ones_like(wavelengths) if weights is None else np.asarray(weights, float)
        )
        total = float(np.sum(weights))
        if total <= 0.0:
            raise InputError("Spectral weights must not all be zero")
        return cls(wavelengths=wavelengths, weights=weights / total)

    @classmethod
    def from_continuous(cls, wavelengths, density) -> "SpectralDensity":
        """Trapezoid weights for a sampled continuous density, then normalize."""
        wavelengths = np.asarray(wavelengths, dtype=float)
        density = np.asarray(density, dtype=float)
        if wavelengths.size < 2:
            return cls.from_lines(wavelengths, density)
        order = np.argsort(wavelengths)
        wavelengths, density = wavelengths[order], density[order]
        widths = np.diff(wavelengths)
        weights = np.zeros_like(density)
        weights[:-1] += 0.5 * widths
        weights[1:] += 0.5 * widths
        return cls.from_lines(wavelengths, density * weights)

    @classmethod
    def monochromatic(cls, wavelength: float) -> "SpectralDensity":
        return cls(wavelengths=[wavelength], weights=[1.0])


class MTFCurve(Entity):
    """Modulation versus image-plane spatial frequency (cycles per meter)."""

    frequencies: np.ndarray
    values: np.ndarray
    orientation: Tuple[float, float] = (1.0, 0.0)
    wavelength: Optional[float] = None

    @field_validator("frequencies", "values", mode="before")
    @classmethod
    def one_dimensional(cls, v):
        return frozen_array(v, ndim=1)

    @property
    def frequencies_cyc_per_mm(self) -> np.ndarray:
        return self.frequencies * 1e-3

    def value_at(self, frequency: float) -> float:
        """Linear interpolation at ``frequency`` in cycles per meter."""
        return float(np.interp(frequency, self.frequencies, self.values))


class PSFGrid(Entity):
    """Image-plane PSF sampled on a square grid, normalized to unit sum."""

    values: np.ndarray
    pixel_pitch: float = Field(gt=0)
    wavelength: float = Field(gt=0)
    pupil_samples: int = settings.PSF_PUPIL_SAMPLES
    padding: int = settings.PSF_PADDING

    @field_validator("values", mode="before")
    @classmethod
    def square(cls, v):
        array = frozen_array(v, ndim=2)
        if array.shape[0] != array.shape[1]:
            raise ValueError(f"PSF grid must be square, got {array.shape}")
        return array

    @property
    def size(self) -> int:
        return int(self.values.shape[0])

    @property
    def peak(self) -> float:
        return float(self.values.max())

    def otf_modulus(self) -> np.ndarray:
        """|DFT(PSF)| with DC at index (size // 2, size // 2), normalized to 1."""
        otf = np.abs(fft2(ifftshift(self.values)))
        otf = otf / otf[0, 0]
        return np.fft.fftshift(otf)

    def mtf_along(self, orientation, frequencies: np.ndarray) -> MTFCurve:
        """
        Sample |DFT(PSF)| along an orientation by bilinear interpolation.

        Args:
            orientation: Angle in degrees or 2-vector
            frequencies: Image-plane frequencies in cycles per meter

        Returns:
            MTF curve from the PSF route
        """
        ux, uy = unit_vector(orientation)
        frequencies = np.asarray(frequencies, dtype=float)
        step = 1.0 / (self.size * self.pixel_pitch)
        centre = self.size // 2
        cols = centre + frequencies * ux / step
        rows = centre + frequencies * uy / step
        values = map_coordinates(
            self.otf_modulus(), [rows, cols], order=1, mode="constant", cval=0.0
        )
        return MTFCurve(
            frequencies=frequencies,
            values=np.clip(values, 0.0, 1.0),
            orientation=(ux, uy),
            wavelength=self.wavelength,
        )
