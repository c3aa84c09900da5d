"""Slanted-edge image and spatial frequency response entities."""
from typing import Optional, Tuple

import numpy as np
from pydantic import Field, field_validator, model_validator
from scipy.stats import t as student_t

from windscreen_optics.config import settings
from windscreen_optics.domain.entities.base import Entity, frozen_array
from windscreen_optics.domain.entities.enums import Orientation


class EdgeImage(Entity):
    """Linear-intensity grayscale raster with one dominant straight edge.

    ``angle_deg`` is the edge angle from vertical, when known.
    """

    values: np.ndarray
    pixel_pitch: float = Field(default=settings.DEFAULT_PIXEL_PITCH_M, gt=0)
    angle_deg: Optional[float] = None

    @field_validator("values", mode="before")
    @classmethod
    def raster(cls, v):
        return frozen_array(v, ndim=2)

    @property
    def shape(self):
        return self.values.shape

    def crop(self, row0: int, col0: int, rows: int, cols: int) -> "EdgeImage":
        """Region of interest as a new image."""
        return EdgeImage(
            values=self.values[row0 : row0 + rows, col0 : col0 + cols],
            pixel_pitch=self.pixel_pitch,
            angle_deg=self.angle_deg,
        )


class SFRCurve(Entity):
    """Spatial frequency response in cycles per pixel, unity at DC."""

    frequencies: np.ndarray
    values: np.ndarray
    angle_deg: float
    snr: float
    reference_frequency: float = settings.SFR_REFERENCE_FREQUENCY

    @field_validator("frequencies", "values", mode="before")
    @classmethod
    def one_dimensional(cls, v):
        return frozen_array(v, ndim=1)

    @model_validator(mode="after")
    def matching(self):
        if self.frequencies.shape != self.values.shape:
            raise ValueError("Frequencies and values differ in length")
        return self

    def value_at(self, frequency: float) -> float:
        """Response at ``frequency`` cycles per pixel by linear interpolation."""
        return float(np.interp(frequency, self.frequencies, self.values))

    @property
    def reference_value(self) -> float:
        return self.value_at(self.reference_frequency)

    def mtf50(self) -> Optional[float]:
        """
        Frequency where the response first drops to 0.5.

        Returns:
            Frequency in cycles per pixel, or None if never reached
        """
        below = np.flatnonzero(self.values <= 0.5)
        if below.size == 0:
            return None
        i = int(below[0])
        if i == 0:
            return float(self.frequencies[0])
        f0, f1 = self.frequencies[i - 1], self.frequencies[i]
        v0, v1 = self.values[i - 1], self.values[i]
        return float(f0 + (v0 - 0.5) * (f1 - f0) / (v0 - v1))

    def frequencies_cyc_per_mm(self, pixel_pitch: float) -> np.ndarray:
        """Frequencies converted to cycles per millimeter."""
        return self.frequencies / (pixel_pitch * 1e3)


class SFRStatistic(Entity):
    """Repeated SFR estimates at the reference frequency for one chart edge or direction.

    ``label`` is an edge name or, for pooled edges, the orientation name.
    """

    label: str
    orientation: Orientation
    samples: np.ndarray
    confidence: float = Field(default=settings.CONFIDENCE_LEVEL, gt=0, lt=1)

    @field_validator("samples", mode="before")
    @classmethod
    def repeated(cls, v):
        array = frozen_array(v, ndim=1)
        if array.size < 2:
            raise ValueError("An interval needs at least two estimates")
        return array

    @property
    def mean(self) -> float:
        return float(np.mean(self.samples))

    @property
    def std(self) -> float:
        return float(np.std(self.samples, ddof=1))

    @property
    def half_width(self) -> float:
        """Half width of the interval covering ``confidence`` of single estimates."""
        dof = self.samples.size - 1
        return float(student_t.ppf(0.5 * (1.0 + self.confidence), dof) * self.std)

    @property
    def interval(self) -> Tuple[float, float]:
        return self.mean - self.half_width, self.mean + self.half_width
