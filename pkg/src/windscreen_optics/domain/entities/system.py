"""Camera lens, windscreen and joint system entities."""
from typing import List, Optional, Tuple

import numpy as np
from pydantic import Field, field_validator, model_validator

from windscreen_optics.config import settings
from windscreen_optics.domain.entities.base import Entity, frozen_array
from windscreen_optics.domain.entities.enums import Orientation
from windscreen_optics.domain.entities.mtf import PupilSpec
from windscreen_optics.domain.entities.zernike import ZernikeCoefficients
from windscreen_optics.domain.exceptions import FieldDomainError, InputError


def _check_field(field_deg: float, fields: np.ndarray, owner: str) -> None:
    if fields.size and not fields.min() <= field_deg <= fields.max():
        raise FieldDomainError(
            f"Field {field_deg} deg is outside the {owner} domain "
            f"[{fields.min()}, {fields.max()}] deg",
            details={"field_deg": field_deg},
        )


class LensModel(Entity):
    """Camera lens with a field curvature table.

    ``field_curvature`` holds (field angle in degrees, focus offset in meters)
    pairs; offsets between table rows are linearly interpolated.
    """

    focal_length: float = Field(default=settings.DEFAULT_FOCAL_LENGTH_M, gt=0)
    f_number: float = Field(default=settings.DEFAULT_F_NUMBER, gt=0)
    field_curvature: List[Tuple[float, float]] = Field(default_factory=list)

    @field_validator("field_curvature")
    @classmethod
    def sorted_finite(cls, v):
        if not np.all(np.isfinite(np.asarray(v, dtype=float))):
            raise ValueError("Field curvature entries must be finite")
        fields = [row[0] for row in v]
        if len(set(fields)) != len(fields):
            raise ValueError("Field curvature has duplicate field angles")
        return sorted((float(a), float(dz)) for a, dz in v)

    @property
    def aperture_radius(self) -> float:
        return self.focal_length / (2.0 * self.f_number)

    @property
    def pupil(self) -> PupilSpec:
        return PupilSpec.from_lens(self.focal_length, self.f_number)

    @property
    def fields(self) -> np.ndarray:
        return np.array([row[0] for row in self.field_curvature], dtype=float)

    def field_offset(self, field_deg: float) -> float:
        """
        Field-curvature focus offset at a field angle.

        Args:
            field_deg: Field angle in degrees

        Returns:
            Offset in meters, 0 for a lens without a table

        Raises:
            FieldDomainError: If the field lies outside the table
        """
        if not self.field_curvature:
            return 0.0
        _check_field(field_deg, self.fields, "lens")
        offsets = [row[1] for row in self.field_curvature]
        return float(np.interp(field_deg, self.fields, offsets))

    def without_field_curvature(self) -> "LensModel":
        return LensModel(focal_length=self.focal_length, f_number=self.f_number)


class WindscreenPatch(Entity):
    """Windscreen refractive power seen at one field angle.

    ``zernike`` optionally gives the patch wavefront in the camera pupil
    frame; it then replaces the per-azimuth defocus from the powers.
    """

    field_deg: float
    power_h: float = 0.0
    power_v: float = 0.0
    zernike: Optional[ZernikeCoefficients] = None

    @model_validator(mode="after")
    def finite(self):
        if not np.all(np.isfinite([self.field_deg, self.power_h, self.power_v])):
            raise InputError("Windscreen patch values must be finite")
        return self


class WindscreenModel(Entity):
    """Refractive power field of the windscreen over the camera cutout."""

    patches: List[WindscreenPatch]
    inclination_deg: float = settings.DEFAULT_INCLINATION_DEG

    @field_validator("patches")
    @classmethod
    def sorted_patches(cls, v):
        if not v:
            raise ValueError("A windscreen needs at least one patch")
        fields = [p.field_deg for p in v]
        if len(set(fields)) != len(fields):
            raise ValueError("Windscreen patches have duplicate field angles")
        with_zernike = [p.zernike is not None for p in v]
        if any(with_zernike) and not all(with_zernike):
            raise ValueError("Either all patches or none carry Zernike coefficients")
        return sorted(v, key=lambda p: p.field_deg)

    @classmethod
    def uniform(
        cls,
        power_h: float,
        power_v: float,
        field_range: Tuple[float, float] = (-30.0, 30.0),
        **kwargs,
    ) -> "WindscreenModel":
        """Windscreen with the same powers across a field range."""
        low, high = field_range
        fields = [low] if low == high else [low, high]
        return cls(
            patches=[
                WindscreenPatch(field_deg=f, power_h=power_h, power_v=power_v)
                for f in fields
            ],
            **kwargs,
        )

    @property
    def fields(self) -> np.ndarray:
        return np.array([p.field_deg for p in self.patches], dtype=float)

    @property
    def has_zernike(self) -> bool:
        return self.patches[0].zernike is not None

    def powers_at(self, field_deg: float) -> Tuple[float, float]:
        """(D_h, D_v) in diopters, linearly interpolated between patches."""
        _check_field(field_deg, self.fields, "windscreen")
        power_h = np.interp(field_deg, self.fields, [p.power_h for p in self.patches])
        power_v = np.interp(field_deg, self.fields, [p.power_v for p in self.patches])
        return float(power_h), float(power_v)

    def power_along(self, field_deg: float, orientation: Orientation) -> float:
        power_h, power_v = self.powers_at(field_deg)
        return power_h if Orientation(orientation) is Orientation.HORIZONTAL else power_v

    def zernike_at(self, field_deg: float) -> Optional[ZernikeCoefficients]:
        """Patch coefficients linearly interpolated between patches."""
        if not self.has_zernike:
            return None
        _check_field(field_deg, self.fields, "windscreen")
        size = max(p.zernike.max_index for p in self.patches)
        table = np.array([p.zernike.padded(size) for p in self.patches])
        values = [np.interp(field_deg, self.fields, column) for column in table.T]
        return ZernikeCoefficients(values=values)


class SystemOffset(Entity):
    """Signed focus offsets of one field point and orientation, in meters."""

    windscreen_shift: float
    field_curvature_shift: float
    field_deg: float = 0.0
    orientation: Orientation = Orientation.HORIZONTAL

    @property
    def total(self) -> float:
        return self.windscreen_shift + self.field_curvature_shift


class SeparabilityReport(Entity):
    """Joint, lens-only and windscreen-factor MTFs with their ratio."""

    frequencies: np.ndarray
    joint: np.ndarray
    lens: np.ndarray
    windscreen: np.ndarray
    ratio: np.ndarray
    cutoff: float
    max_deviation: float
    non_separable: bool
    reference_frequency: float
    joint_at_reference: float
    lens_at_reference: float

    @field_validator("frequencies", "joint", "lens", "windscreen", "ratio", mode="before")
    @classmethod
    def one_dimensional(cls, v):
        return frozen_array(v, ndim=1)

    @property
    def sharpening(self) -> bool:
        """Joint system sharper than the lens alone at the reference frequency."""
        return self.joint_at_reference > self.lens_at_reference
