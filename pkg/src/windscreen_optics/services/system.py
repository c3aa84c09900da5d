"""Joint windscreen and camera model.

Sign convention: a positive (converging) windscreen power shortens the focus,
giving a negative windscreen focus shift toward the lens. Focus offsets are
added, so opposite-signed windscreen and field-curvature shifts cancel.
"""
from typing import Iterable, Optional

import numpy as np
from joblib import Parallel, delayed
from loguru import logger

from windscreen_optics.config import settings
from windscreen_optics.domain.entities.enums import Orientation
from windscreen_optics.domain.entities.mtf import MTFCurve
from windscreen_optics.domain.entities.system import (
    LensModel,
    SeparabilityReport,
    SystemOffset,
    WindscreenModel,
)
from windscreen_optics.domain.entities.zernike import ZernikeCoefficients
from windscreen_optics.domain.exceptions import ApproximationValidityError
from windscreen_optics.services.mtf import (
    OverlapIntegrator,
    diffraction_limited_mtf,
    mtf_mono,
)

DEFOCUS_FACTOR = 16.0 * np.sqrt(3.0)


def windscreen_defocus(
    power: float,
    lens: LensModel,
    limit: float = settings.WINDSCREEN_VALIDITY_LIMIT,
) -> float:
    """
    First-order focus shift of a weak windscreen element in front of the lens.

    Args:
        power: Windscreen refractive power in diopters
        lens: Camera lens
        limit: Largest accepted |D * f|

    Returns:
        Focus shift -f^2 * D in meters

    Raises:
        ApproximationValidityError: If |D * f| exceeds the limit
    """
    strength = abs(power * lens.focal_length)
    if strength > limit:
        raise ApproximationValidityError(
            f"|D f| = {strength:.3f} exceeds {limit}; first-order focus shift invalid",
            details={"power_dpt": power, "focal_length_m": lens.focal_length},
        )
    return -lens.focal_length**2 * power


def thin_lens_focus_shift(power: float, lens: LensModel) -> float:
    """Exact focus shift of two thin elements in contact: 1/(1/f + D) - f."""
    return 1.0 / (1.0 / lens.focal_length + power) - lens.focal_length


def combined_offset(
    lens: LensModel,
    ws: Optional[WindscreenModel],
    field_deg: float,
    orientation: Orientation,
) -> SystemOffset:
    """
    Add windscreen and field-curvature focus offsets for one field point.

    Args:
        lens: Camera lens
        ws: Windscreen, or None for the lens alone
        field_deg: Field angle in degrees
        orientation: Horizontal uses D_h, vertical uses D_v

    Returns:
        Both addends of the system offset

    Raises:
        FieldDomainError: If the field lies outside either model
    """
    orientation = Orientation(orientation)
    fc_shift = lens.field_offset(field_deg)
    ws_shift = 0.0
    if ws is not None:
        ws_shift = windscreen_defocus(ws.power_along(field_deg, orientation), lens)
    return SystemOffset(
        windscreen_shift=ws_shift,
        field_curvature_shift=fc_shift,
        field_deg=field_deg,
        orientation=orientation,
    )


def defocus_to_c4(dz: float, lens: LensModel) -> float:
    """Defocus coefficient c4 = dz / (16 sqrt(3) N^2), meters."""
    return dz / (DEFOCUS_FACTOR * lens.f_number**2)


def c4_to_defocus(c4: float, lens: LensModel) -> float:
    """Inverse of ``defocus_to_c4``."""
    return c4 * DEFOCUS_FACTOR * lens.f_number**2


def system_coefficients(
    lens: LensModel, ws: Optional[WindscreenModel], field_deg: float
) -> ZernikeCoefficients:
    """
    Joint pupil wavefront of windscreen and lens at one field point.

    Horizontal and vertical defocus c4_h, c4_v become c4 = (c4_h + c4_v) / 2
    and c5 = (c4_h - c4_v) / sqrt(2), which reproduces each azimuthal
    defocus exactly along its axis. Windscreen patches with Zernike
    coefficients add those instead.

    Args:
        lens: Camera lens
        ws: Windscreen, or None
        field_deg: Field angle in degrees

    Returns:
        Coefficients up to index 5 or the patch order, meters
    """
    if ws is not None and ws.has_zernike:
        patch = ws.zernike_at(field_deg)
        values = patch.padded(max(5, patch.max_index))
        values[4] += defocus_to_c4(lens.field_offset(field_deg), lens)
        return ZernikeCoefficients(values=values)

    c4_h = defocus_to_c4(
        combined_offset(lens, ws, field_deg, Orientation.HORIZONTAL).total, lens
    )
    c4_v = defocus_to_c4(
        combined_offset(lens, ws, field_deg, Orientation.VERTICAL).total, lens
    )
    return ZernikeCoefficients.from_mapping(
        {4: 0.5 * (c4_h + c4_v), 5: (c4_h - c4_v) / np.sqrt(2.0)}, max_index=5
    )


def default_frequencies(lens: LensModel, wavelength: float) -> np.ndarray:
    cutoff = lens.pupil.cutoff(wavelength)
    return np.linspace(0.0, cutoff, settings.MTF_FREQUENCY_SAMPLES)


def system_mtf(
    lens: LensModel,
    ws: Optional[WindscreenModel],
    field_deg: float,
    orientation: Orientation,
    wavelength: float = settings.DEFAULT_WAVELENGTH_M,
    frequencies: Optional[np.ndarray] = None,
    integrator: Optional[OverlapIntegrator] = None,
) -> MTFCurve:
    """
    MTF of windscreen and lens together along one orientation.

    Args:
        lens: Camera lens
        ws: Windscreen, or None for the lens-only baseline
        field_deg: Field angle in degrees
        orientation: Measurement orientation
        wavelength: Wavelength in meters
        frequencies: Image-plane frequencies in cycles per meter,
            default 0 to the cutoff
        integrator: Overlap integrator

    Returns:
        System MTF curve
    """
    if frequencies is None:
        frequencies = default_frequencies(lens, wavelength)
    coefficients = system_coefficients(lens, ws, field_deg)
    return mtf_mono(
        coefficients,
        lens.pupil,
        wavelength,
        frequencies,
        Orientation(orientation).unit_vector,
        integrator,
    )


def separability_report(
    lens: LensModel,
    ws: WindscreenModel,
    field_deg: float,
    orientation: Orientation,
    wavelength: float = settings.DEFAULT_WAVELENGTH_M,
    frequencies: Optional[np.ndarray] = None,
    reference_fraction: float = settings.SYSTEM_REFERENCE_FRACTION,
    integrator: Optional[OverlapIntegrator] = None,
) -> SeparabilityReport:
    """
    Compare the joint MTF with the product of lens and windscreen MTFs.

    The windscreen factor is the MTF of the windscreen alone (same pupil, no
    field curvature) divided by the diffraction limit, so a zero-power
    windscreen has a factor of exactly one. The deviation from separability
    is taken below the band limit, at the reference frequency included, and
    only where the lens-only MTF and the product both exceed
    SEPARABILITY_DEVIATION_FLOOR.

    Args:
        lens: Camera lens
        ws: Windscreen
        field_deg: Field angle in degrees
        orientation: Measurement orientation
        wavelength: Wavelength in meters
        frequencies: Image-plane frequencies in cycles per meter
        reference_fraction: Reference frequency as a fraction of the cutoff
        integrator: Overlap integrator

    Returns:
        Separability report
    """
    integrator = integrator or OverlapIntegrator()
    cutoff = lens.pupil.cutoff(wavelength)
    if frequencies is None:
        frequencies = default_frequencies(lens, wavelength)
    frequencies = np.asarray(frequencies, dtype=float)
    reference = reference_fraction * cutoff
    sampled = np.append(frequencies, reference)

    def curve(lens_part: LensModel, ws_part: Optional[WindscreenModel]) -> np.ndarray:
        return system_mtf(
            lens_part, ws_part, field_deg, orientation, wavelength, sampled, integrator
        ).values

    joint = curve(lens, ws)
    lens_only = curve(lens, None)
    ws_only = curve(lens.without_field_curvature(), ws)
    diffraction = diffraction_limited_mtf(sampled / cutoff)

    floor = settings.SEPARABILITY_FLOOR
    factor = np.full(sampled.shape, np.nan)
    usable = diffraction > floor
    factor[usable] = ws_only[usable] / diffraction[usable]
    product = lens_only * factor
    ratio = np.full(sampled.shape, np.nan)
    usable &= (lens_only > floor) & (product > floor)
    ratio[usable] = joint[usable] / product[usable]

    strong = (lens_only > settings.SEPARABILITY_DEVIATION_FLOOR) & (
        product > settings.SEPARABILITY_DEVIATION_FLOOR
    )
    band = usable & strong & (sampled < settings.SEPARABILITY_BAND * cutoff)
    max_deviation = float(np.max(np.abs(ratio[band] - 1.0))) if band.any() else 0.0
    report = SeparabilityReport(
        frequencies=frequencies,
        joint=joint[:-1],
        lens=lens_only[:-1],
        windscreen=factor[:-1],
        ratio=ratio[:-1],
        cutoff=cutoff,
        max_deviation=max_deviation,
        non_separable=max_deviation > settings.SEPARABILITY_TOLERANCE,
        reference_frequency=reference,
        joint_at_reference=float(joint[-1]),
        lens_at_reference=float(lens_only[-1]),
    )
    logger.info(
        f"Separability at {field_deg} deg {Orientation(orientation).value}: "
        f"max deviation {max_deviation:.3f}, sharpening {report.sharpening}"
    )
    return report


def field_sweep(
    lens: LensModel,
    ws: Optional[WindscreenModel],
    fields: Iterable[float],
    orientation: Orientation,
    wavelength: float = settings.DEFAULT_WAVELENGTH_M,
    frequency: Optional[float] = None,
    n_jobs: int = settings.N_JOBS,
) -> np.ndarray:
    """
    System MTF at one frequency across field angles.

    Args:
        lens: Camera lens
        ws: Windscreen, or None
        fields: Field angles in degrees
        orientation: Measurement orientation
        wavelength: Wavelength in meters
        frequency: Frequency in cycles per meter, default reference frequency
        n_jobs: joblib workers

    Returns:
        MTF value per field angle
    """
    if frequency is None:
        frequency = settings.SYSTEM_REFERENCE_FRACTION * lens.pupil.cutoff(wavelength)
    curves = Parallel(n_jobs=n_jobs)(
        delayed(system_mtf)(lens, ws, field, orientation, wavelength, [frequency])
        for field in fields
    )
    return np.array([c.values[0] for c in curves])
