"""Sampled wavefront, gradient and power entities."""
from typing import Callable, List, Tuple

import numpy as np
from pydantic import Field, field_validator, model_validator

from windscreen_optics.domain.entities.base import Entity, frozen_array
from windscreen_optics.domain.entities.enums import PowerAxis
from windscreen_optics.domain.entities.zernike import (
    DISK_TOLERANCE,
    DiskGrid,
    ZernikeCoefficients,
)


class SampledMap(Entity):
    """Scalar field on a regular grid over the normalized disk.

    ``values`` is indexed [row=y, col=x]. Invalid samples are NaN, never zero.
    """

    values: np.ndarray
    x: np.ndarray
    y: np.ndarray
    aperture_radius: float = Field(gt=0)

    @field_validator("values", mode="before")
    @classmethod
    def values_2d(cls, v):
        return frozen_array(v, ndim=2)

    @field_validator("x", "y", mode="before")
    @classmethod
    def axis_1d(cls, v):
        return frozen_array(v, ndim=1)

    @model_validator(mode="after")
    def shapes_match(self):
        """Check that the axes match the value grid."""
        if self.values.shape != (self.y.size, self.x.size):
            raise ValueError(
                f"Value grid {self.values.shape} does not match axes "
                f"({self.y.size}, {self.x.size})"
            )
        return self

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    @property
    def mask(self) -> np.ndarray:
        """Valid (finite) samples."""
        return np.isfinite(self.values)

    @property
    def valid_count(self) -> int:
        return int(np.count_nonzero(self.mask))

    @property
    def spacing(self) -> float:
        """Normalized sample spacing along x."""
        return float(self.x[1] - self.x[0]) if self.x.size > 1 else 0.0

    @property
    def physical_spacing(self) -> float:
        return self.spacing * self.aperture_radius

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x, self.y)

    def valid_mean(self) -> float:
        """Mean over valid samples."""
        return float(np.mean(self.values[self.mask])) if self.valid_count else 0.0

    def valid_max_abs(self) -> float:
        return float(np.max(np.abs(self.values[self.mask]))) if self.valid_count else 0.0


class WavefrontMap(SampledMap):
    """Optical path difference W in meters over the pupil."""

    @classmethod
    def from_function(
        cls, func: Callable[[np.ndarray, np.ndarray], np.ndarray], grid: DiskGrid
    ) -> "WavefrontMap":
        """
        Sample ``func(x, y)`` (normalized coordinates, meters out) on a disk grid.

        Args:
            func: Vectorized wavefront function
            grid: Disk sampling spec

        Returns:
            Wavefront map with NaN outside the disk
        """
        x, y = grid.mesh()
        mask = grid.mask()
        values = np.full(mask.shape, np.nan)
        values[mask] = func(x[mask], y[mask])
        return cls(
            values=values,
            x=grid.coordinates,
            y=grid.coordinates,
            aperture_radius=grid.aperture_radius,
        )

    def with_values(self, values: np.ndarray) -> "WavefrontMap":
        """Return a map on the same grid with new values."""
        return WavefrontMap(
            values=values, x=self.x, y=self.y, aperture_radius=self.aperture_radius
        )

    def __add__(self, other: "WavefrontMap") -> "WavefrontMap":
        return self.with_values(self.values + other.values)


class RefractivePowerMap(SampledMap):
    """Second derivative of W along one axis, in diopters."""

    axis: PowerAxis


class PowerStatistics(Entity):
    """Frequency distribution of local refractive power over the valid aperture.

    ``interval`` holds the central ``confidence`` quantiles of the local values.
    """

    axis: PowerAxis
    bin_edges: np.ndarray
    counts: np.ndarray
    mean: float
    std: float
    interval: Tuple[float, float]
    confidence: float = Field(gt=0, lt=1)

    @field_validator("bin_edges", "counts", mode="before")
    @classmethod
    def one_dimensional(cls, v):
        return frozen_array(v, ndim=1)

    @model_validator(mode="after")
    def bins_match(self):
        if self.bin_edges.size != self.counts.size + 1:
            raise ValueError("Expected one more bin edge than counts")
        return self

    @property
    def sample_count(self) -> int:
        return int(np.sum(self.counts))

    @property
    def bin_centres(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])


class ScalarMap(SampledMap):
    """Derived scalar field, e.g. trace or blur proxy of the dioptric matrix."""

    unit: str = ""


class GradientField(Entity):
    """Shack-Hartmann spot displacements at the lenslet centres."""

    positions: np.ndarray
    displacements: np.ndarray
    lenslet_focal_length: float = Field(gt=0)
    aperture_radius: float = Field(gt=0)
    flagged_indices: Tuple[int, ...] = ()

    @field_validator("positions", "displacements", mode="before")
    @classmethod
    def two_columns(cls, v):
        array = frozen_array(v, ndim=2)
        if array.shape[1] != 2:
            raise ValueError(f"Expected an (m, 2) array, got {array.shape}")
        if not np.all(np.isfinite(array)):
            raise ValueError("Lenslet data must be finite")
        return array

    @model_validator(mode="after")
    def consistent(self):
        """Check lenslet count and disk membership."""
        if self.positions.shape != self.displacements.shape:
            raise ValueError("Positions and displacements differ in length")
        radius2 = np.sum(self.positions**2, axis=1)
        if np.any(radius2 > 1.0 + DISK_TOLERANCE):
            raise ValueError("Lenslet centres must lie inside the unit disk")
        return self

    @property
    def count(self) -> int:
        return int(self.positions.shape[0])

    @property
    def beta(self) -> np.ndarray:
        """Local wavefront slopes recovered from the spot displacements."""
        d = self.displacements
        return d / np.sqrt(self.lenslet_focal_length**2 + d**2)


class DioptricPowerMatrix(Entity):
    """2x2 Hessian of W at a grid node, in diopters."""

    matrix: np.ndarray
    x: float
    y: float

    @field_validator("matrix", mode="before")
    @classmethod
    def symmetric_2x2(cls, v):
        array = frozen_array(v, ndim=2)
        if array.shape != (2, 2):
            raise ValueError(f"Expected a 2x2 matrix, got {array.shape}")
        return array

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix))

    @property
    def determinant(self) -> float:
        return float(np.linalg.det(self.matrix))

    @property
    def trace_identity(self) -> float:
        """Determinant expressed through traces: ((tr D)^2 - tr(D^2)) / 2."""
        return 0.5 * (np.trace(self.matrix) ** 2 - np.trace(self.matrix @ self.matrix))

    @property
    def principal_powers(self) -> np.ndarray:
        """Eigenvalues in descending order."""
        return np.linalg.eigvalsh(self.matrix)[::-1]

    def sphere_cylinder_axis(self) -> Tuple[float, float, float]:
        """
        Ophthalmic form of the matrix in minus-cylinder convention.

        Returns:
            (sphere, cylinder, axis_deg) with cylinder <= 0 and axis in [0, 180)
        """
        eigenvalues, eigenvectors = np.linalg.eigh(self.matrix)
        sphere = float(eigenvalues[1])
        cylinder = float(eigenvalues[0] - eigenvalues[1])
        vx, vy = eigenvectors[:, 1]
        axis = float(np.degrees(np.arctan2(vy, vx)) % 180.0)
        return sphere, cylinder, axis


class Reconstruction(Entity):
    """Least-squares Zernike fit of a gradient field."""

    coefficients: ZernikeCoefficients
    residual_norm: float
    condition_number: float
    fitted_indices: Tuple[int, ...]


class SubAperture(Entity):
    """Tile of a global map placed at a (row, col) offset."""

    map: WavefrontMap
    offset: Tuple[int, int]

    @property
    def rows(self) -> slice:
        return slice(self.offset[0], self.offset[0] + self.map.shape[0])

    @property
    def cols(self) -> slice:
        return slice(self.offset[1], self.offset[1] + self.map.shape[1])


class StitchResult(Entity):
    """Stitched global map with overlap diagnostics."""

    map: WavefrontMap
    residual_rms: float
    residual_max: float
    corrections: List[Tuple[float, float, float]]
