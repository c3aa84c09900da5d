"""Zernike coefficient vectors and unit-disk sampling entities."""
import math
from typing import Dict, List, Tuple

import numpy as np
from pydantic import Field, field_validator, model_validator

from windscreen_optics.config import settings
from windscreen_optics.domain.entities.base import Entity, frozen_array
from windscreen_optics.domain.exceptions import DiskDomainError, UnsupportedOrderError

DISK_TOLERANCE = 1e-12


class ZernikeCoefficients(Entity):
    """Coefficients c_0..c_N in meters, ANSI linear indexing."""

    values: np.ndarray
    unobservable: Tuple[int, ...] = ()

    @field_validator("values", mode="before")
    @classmethod
    def values_finite(cls, v):
        """Validate a finite, non-empty coefficient vector."""
        array = frozen_array(v, ndim=1)
        if array.size == 0:
            raise ValueError("Coefficient vector must not be empty")
        if not np.all(np.isfinite(array)):
            raise ValueError("Coefficients must be finite")
        if array.size - 1 > settings.MAX_ZERNIKE_INDEX:
            raise UnsupportedOrderError(
                f"Index {array.size - 1} exceeds the implemented maximum "
                f"{settings.MAX_ZERNIKE_INDEX}"
            )
        return array

    @property
    def max_index(self) -> int:
        return int(self.values.size - 1)

    @classmethod
    def zeros(cls, max_index: int) -> "ZernikeCoefficients":
        """Create an all-zero vector c_0..c_max_index."""
        return cls(values=np.zeros(max_index + 1))

    @classmethod
    def from_mapping(
        cls, mapping: Dict[int, float], max_index: int | None = None
    ) -> "ZernikeCoefficients":
        """
        Build a coefficient vector from a sparse index-to-value mapping.

        Args:
            mapping: Coefficient values in meters keyed by ANSI index
            max_index: Length of the vector minus one; defaults to the largest key

        Returns:
            Dense coefficient vector
        """
        top = max(mapping, default=0) if max_index is None else max_index
        values = np.zeros(top + 1)
        for index, value in mapping.items():
            if index < 0 or index > top:
                raise UnsupportedOrderError(f"Index {index} outside 0..{top}")
            values[index] = value
        return cls(values=values)

    def get(self, index: int) -> float:
        """Return c_index, zero beyond the stored range."""
        return float(self.values[index]) if 0 <= index <= self.max_index else 0.0

    def with_value(self, index: int, value: float) -> "ZernikeCoefficients":
        """Return a copy with c_index replaced, extending the vector if needed."""
        size = max(self.max_index, index) + 1
        values = np.zeros(size)
        values[: self.values.size] = self.values
        values[index] = value
        return self.model_copy(update={"values": frozen_array(values)})

    def padded(self, max_index: int) -> np.ndarray:
        """Coefficients as a plain array of length max_index + 1."""
        values = np.zeros(max(max_index, self.max_index) + 1)
        values[: self.values.size] = self.values
        return values[: max_index + 1]

    @property
    def values_um(self) -> np.ndarray:
        return self.values * 1e6

    @property
    def rms(self) -> float:
        """Wavefront RMS over the disk, piston excluded."""
        return float(np.sqrt(np.sum(self.values[1:] ** 2)))

    def nonzero(self) -> List[int]:
        """Indices with a nonzero coefficient."""
        return [int(i) for i in np.flatnonzero(self.values)]

    def to_records(self) -> List[dict]:
        """Coefficient file records ``{index, value_m}``."""
        return [
            {"index": index, "value_m": float(value)}
            for index, value in enumerate(self.values)
        ]


class DiskPoint(Entity):
    """Point in the closed unit disk, normalized Cartesian coordinates."""

    x: float
    y: float

    @model_validator(mode="after")
    def inside_disk(self):
        """Reject points outside the closed unit disk."""
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise DiskDomainError(f"Non-finite disk point ({self.x}, {self.y})")
        if self.x * self.x + self.y * self.y > 1.0 + DISK_TOLERANCE:
            raise DiskDomainError(
                f"Point ({self.x}, {self.y}) lies outside the unit disk"
            )
        return self

    @classmethod
    def from_polar(cls, rho: float, phi: float) -> "DiskPoint":
        """Create a point from normalized radius and polar angle."""
        return cls(x=rho * math.cos(phi), y=rho * math.sin(phi))

    @property
    def rho(self) -> float:
        return math.hypot(self.x, self.y)

    @property
    def phi(self) -> float:
        return math.atan2(self.y, self.x) % (2.0 * math.pi)


class DiskGrid(Entity):
    """Regular Cartesian sampling of the unit disk.

    Nodes are ``linspace(-1, 1, size)`` along both axes. An odd size puts a
    node at the disk centre. Nodes with x^2 + y^2 > 1 are invalid.
    """

    size: int = Field(default=settings.DEFAULT_GRID_SIZE, ge=3)
    aperture_radius: float = Field(default=1.0, gt=0)

    @property
    def coordinates(self) -> np.ndarray:
        return np.linspace(-1.0, 1.0, self.size)

    @property
    def spacing(self) -> float:
        """Normalized node spacing."""
        return 2.0 / (self.size - 1)

    @property
    def physical_spacing(self) -> float:
        """Node spacing in meters."""
        return self.spacing * self.aperture_radius

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        """Node coordinates as (X, Y) arrays indexed [row=y, col=x]."""
        return np.meshgrid(self.coordinates, self.coordinates)

    def mask(self) -> np.ndarray:
        """Boolean mask of nodes inside the closed unit disk."""
        x, y = self.mesh()
        return x * x + y * y <= 1.0 + DISK_TOLERANCE
