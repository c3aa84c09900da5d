"""Domain entities for windscreen optics."""
from windscreen_optics.domain.entities.base import Entity
from windscreen_optics.domain.entities.enums import (
    ChartEdge,
    MTFMethod,
    Orientation,
    PowerAxis,
)
from windscreen_optics.domain.entities.mtf import (
    MTFCurve,
    PSFGrid,
    PupilSpec,
    SpectralDensity,
)
from windscreen_optics.domain.entities.sfr import EdgeImage, SFRCurve, SFRStatistic
from windscreen_optics.domain.entities.system import (
    LensModel,
    SeparabilityReport,
    SystemOffset,
    WindscreenModel,
    WindscreenPatch,
)
from windscreen_optics.domain.entities.wavefront import (
    DioptricPowerMatrix,
    GradientField,
    PowerStatistics,
    Reconstruction,
    RefractivePowerMap,
    ScalarMap,
    StitchResult,
    SubAperture,
    WavefrontMap,
)
from windscreen_optics.domain.entities.zernike import (
    DiskGrid,
    DiskPoint,
    ZernikeCoefficients,
)

__all__ = [
    "Entity",
    "ChartEdge",
    "MTFMethod",
    "Orientation",
    "PowerAxis",
    "MTFCurve",
    "PSFGrid",
    "PupilSpec",
    "SpectralDensity",
    "EdgeImage",
    "SFRCurve",
    "SFRStatistic",
    "LensModel",
    "SeparabilityReport",
    "SystemOffset",
    "WindscreenModel",
    "WindscreenPatch",
    "DioptricPowerMatrix",
    "GradientField",
    "PowerStatistics",
    "Reconstruction",
    "RefractivePowerMap",
    "ScalarMap",
    "StitchResult",
    "SubAperture",
    "WavefrontMap",
    "DiskGrid",
    "DiskPoint",
    "ZernikeCoefficients",
]
