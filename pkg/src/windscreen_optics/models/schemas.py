# src/windscreen_optics/models/schemas.py
"""File and message schemas for the command line tool."""

from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, Field

from windscreen_optics.config import settings
from windscreen_optics.domain.entities.system import (
    LensModel,
    WindscreenModel,
    WindscreenPatch,
)
from windscreen_optics.domain.entities.zernike import ZernikeCoefficients


class ErrorResponse(BaseModel):
    """Single-line machine-readable error written to stderr."""

    exit_code: int
    message: str
    error_type: str
    details: Optional[Dict[str, Any]] = None


class CoefficientRecord(BaseModel):
    """One Zernike coefficient in meters."""

    index: int = Field(ge=0, le=settings.MAX_ZERNIKE_INDEX)
    value_m: float


CoefficientList = List[Union[CoefficientRecord, float]]


def coefficients_from_list(items: CoefficientList) -> ZernikeCoefficients:
    """Dense numbers or ``{index, value_m}`` records to a coefficient vector."""
    if items and all(isinstance(item, CoefficientRecord) for item in items):
        return ZernikeCoefficients.from_mapping(
            {item.index: item.value_m for item in items}
        )
    if any(isinstance(item, CoefficientRecord) for item in items):
        raise ValueError("Mix of coefficient records and plain numbers")
    return ZernikeCoefficients(values=[float(item) for item in items])


class CoefficientFile(BaseModel):
    """Coefficient file with optional metadata."""

    coefficients: CoefficientList
    metadata: Dict[str, Any] = Field(default_factory=dict)

    def to_domain(self) -> ZernikeCoefficients:
        return coefficients_from_list(self.coefficients)

    @classmethod
    def from_domain(
        cls, c: ZernikeCoefficients, metadata: Optional[Dict[str, Any]] = None
    ) -> "CoefficientFile":
        return cls(
            coefficients=[CoefficientRecord(**record) for record in c.to_records()],
            metadata=metadata or {},
        )


class ReconstructionOutput(BaseModel):
    """Result of ``reconstruct``."""

    coefficients: List[CoefficientRecord]
    residual_norm: float
    unobservable: List[int]
    condition_number: float


class FieldCurvatureEntry(BaseModel):
    field_deg: float
    dz_m: float


class LensSpec(BaseModel):
    f_m: float = Field(default=settings.DEFAULT_FOCAL_LENGTH_M, gt=0)
    f_number: float = Field(default=settings.DEFAULT_F_NUMBER, gt=0)
    field_curvature: List[FieldCurvatureEntry] = Field(default_factory=list)

    def to_domain(self) -> LensModel:
        return LensModel(
            focal_length=self.f_m,
            f_number=self.f_number,
            field_curvature=[(e.field_deg, e.dz_m) for e in self.field_curvature],
        )


class PatchSpec(BaseModel):
    field_deg: float
    Dh_dpt: float = 0.0
    Dv_dpt: float = 0.0
    zernike: Optional[CoefficientList] = None


class WindscreenSpec(BaseModel):
    patches: List[PatchSpec]
    inclination_deg: float = settings.DEFAULT_INCLINATION_DEG

    def to_domain(self) -> WindscreenModel:
        return WindscreenModel(
            patches=[
                WindscreenPatch(
                    field_deg=p.field_deg,
                    power_h=p.Dh_dpt,
                    power_v=p.Dv_dpt,
                    zernike=(
                        coefficients_from_list(p.zernike)
                        if p.zernike is not None
                        else None
                    ),
                )
                for p in self.patches
            ],
            inclination_deg=self.inclination_deg,
        )


class SystemSpec(BaseModel):
    """System model file: lens plus optional windscreen."""

    lens: LensSpec = Field(default_factory=LensSpec)
    windscreen: Optional[WindscreenSpec] = None


class SFRSummary(BaseModel):
    """One-line summary printed by the ``sfr`` command."""

    reference_frequency: float
    sfr_at_reference: float
    angle_deg: float
    snr: Optional[float] = None
    mtf50: Optional[float] = None


class PowerSummary(BaseModel):
    """Expectation and interval of one power axis, printed by ``refpower``."""

    axis: str
    mean_dpt: float
    std_dpt: float
    interval_dpt: Tuple[float, float]
    confidence: float
    samples: int


class ChartSummary(BaseModel):
    """Repeated-estimate SFR of one chart edge or direction."""

    label: str
    orientation: str
    mean: float
    half_width: float
    confidence: float
    estimates: int
