# src/windscreen_optics/cli.py
"""Command line front end.

Every failure ends with one JSON line on stderr and the error's exit code:
2 for input and parse errors, 3 for numerical errors, 4 for measurement
validity errors.
"""
import functools
import json
import math
import sys
from pathlib import Path
from typing import Optional

import click
import numpy as np
import pandas as pd
from loguru import logger
from pydantic import ValidationError

from windscreen_optics import __version__
from windscreen_optics.config import settings
from windscreen_optics.domain.entities.enums import MTFMethod, Orientation
from windscreen_optics.domain.entities.mtf import PupilSpec, SpectralDensity
from windscreen_optics.domain.entities.sfr import EdgeImage
from windscreen_optics.domain.entities.zernike import DiskGrid, ZernikeCoefficients
from windscreen_optics.domain.exceptions import InputError, WindscreenOpticsError
from windscreen_optics.infrastructure.io import (
    MTF_FLOAT_FORMAT,
    read_coefficients,
    read_gradients_csv,
    read_image,
    read_psd_csv,
    read_system,
    read_wavefront_csv,
    to_counts,
    write_coefficients,
    write_model,
    write_pgm,
    write_power_csv,
    write_power_histogram_csv,
    write_table,
)
from windscreen_optics.models.schemas import (
    ChartSummary,
    CoefficientRecord,
    ErrorResponse,
    PowerSummary,
    ReconstructionOutput,
    SFRSummary,
)
from windscreen_optics.services.mtf import (
    OverlapIntegrator,
    mtf_poly,
    psf_from_pupil,
)
from windscreen_optics.services.sfr import (
    chart_rois,
    chart_statistics,
    estimate_sfr,
    render_chart,
    render_edge,
)
from windscreen_optics.services.system import (
    separability_report,
    system_coefficients,
)
from windscreen_optics.services.wavefront import (
    blur_ellipse_proxy,
    laplace_trace,
    power_maps,
    power_statistics,
    reconstruct,
)
from windscreen_optics.services.zernike import decompose, is_harmonic, synthesize
from windscreen_optics.utils.logging import LogLevel, setup_logging

MM = 1e-3
NM = 1e-9


def _emit_error(exit_code: int, message: str, error_type: str, details=None) -> None:
    response = ErrorResponse(
        exit_code=exit_code, message=message, error_type=error_type, details=details
    )
    click.echo(response.model_dump_json(), err=True)
    sys.exit(exit_code)


class JsonErrorGroup(click.Group):
    """Click group that reports every failure as one JSON line."""

    def main(self, *args, **kwargs):
        kwargs["standalone_mode"] = False
        try:
            result = super().main(*args, **kwargs)
        except WindscreenOpticsError as e:
            logger.debug(f"{type(e).__name__}: {e.message}")
            _emit_error(e.exit_code, e.message, e.error_type, e.details or None)
        except ValidationError as e:
            first = e.errors()[0]
            location = ".".join(str(part) for part in first["loc"])
            _emit_error(2, f"{location}: {first['msg']}", "validation_error")
        except click.ClickException as e:
            _emit_error(2, e.format_message(), "usage_error")
        except click.Abort:
            _emit_error(1, "Aborted", "aborted")
        except Exception as e:
            logger.exception("Unexpected failure")
            _emit_error(1, str(e) or type(e).__name__, "internal")
        if isinstance(result, int) and result != 0:
            sys.exit(result)
        return result


def common_options(func):
    """Options shared by every subcommand."""

    @click.option(
        "--log-level",
        type=click.Choice([level.value for level in LogLevel], case_sensitive=False),
        default=None,
        help="Diagnostics level on stderr (default WARNING).",
    )
    @click.option(
        "--lambda-nm",
        type=float,
        default=settings.DEFAULT_WAVELENGTH_M / NM,
        show_default=True,
        help="Wavelength in nanometers.",
    )
    @click.option(
        "--grid",
        type=int,
        default=settings.DEFAULT_GRID_SIZE,
        show_default=True,
        help="Samples across the aperture for synthesized maps.",
    )
    @click.option("--seed", type=int, default=None, help="Seed for stochastic steps.")
    @functools.wraps(func)
    def wrapper(*args, log_level=None, **kwargs):
        setup_logging(log_level)
        if kwargs["lambda_nm"] <= 0.0:
            raise InputError("--lambda-nm must be positive")
        return func(*args, **kwargs)

    return wrapper


def _pupil(
    aperture_radius_mm: Optional[float],
    distance_mm: Optional[float],
    focal_length_mm: float,
    f_number: float,
) -> PupilSpec:
    if (aperture_radius_mm is None) != (distance_mm is None):
        raise InputError("--aperture-radius-mm and --distance-mm go together")
    if aperture_radius_mm is not None:
        return PupilSpec(
            aperture_radius=aperture_radius_mm * MM, distance=distance_mm * MM
        )
    return PupilSpec.from_lens(focal_length_mm * MM, f_number)


def _optional_mm(value: Optional[float]) -> Optional[float]:
    return None if value is None else value * MM


def _finite_or_none(value: Optional[float]) -> Optional[float]:
    return value if value is not None and math.isfinite(value) else None


@click.group(cls=JsonErrorGroup)
@click.version_option(__version__, prog_name="windscreen-optics")
def cli():
    """Wavefront metrology for windscreen and camera systems."""


@cli.command("decompose")
@click.option("--input", "input_path", type=click.Path(path_type=Path), required=True)
@click.option("--output", "output_path", type=click.Path(path_type=Path), required=True)
@click.option("--max-index", type=int, default=settings.MAX_ZERNIKE_INDEX, show_default=True)
@click.option("--aperture-radius-mm", type=float, default=None)
@common_options
def decompose_cmd(input_path, output_path, max_index, aperture_radius_mm, **_):
    """Decompose a wavefront map CSV (x,y,w_m) into Zernike coefficients."""
    w = read_wavefront_csv(input_path, _optional_mm(aperture_radius_mm))
    c, residual_rms = decompose(w, max_index)
    write_coefficients(
        output_path,
        c,
        {"residual_rms_m": residual_rms, "samples": w.valid_count},
    )
    logger.info(f"Decomposed {w.valid_count} samples into Z0..Z{max_index}")


@cli.command("reconstruct")
@click.option("--input", "input_path", type=click.Path(path_type=Path), required=True)
@click.option("--output", "output_path", type=click.Path(path_type=Path), required=True)
@click.option("--max-index", type=int, default=settings.MAX_ZERNIKE_INDEX, show_default=True)
@click.option("--first-index", type=int, default=settings.DEFAULT_FIRST_INDEX, show_default=True)
@click.option("--lenslet-focal-length-mm", type=float, default=None)
@click.option("--aperture-radius-mm", type=float, default=None)
@common_options
def reconstruct_cmd(
    input_path,
    output_path,
    max_index,
    first_index,
    lenslet_focal_length_mm,
    aperture_radius_mm,
    **_,
):
    """Reconstruct coefficients from a Shack-Hartmann gradient CSV."""
    g = read_gradients_csv(
        input_path,
        _optional_mm(lenslet_focal_length_mm),
        _optional_mm(aperture_radius_mm),
    )
    result = reconstruct(g, max_index, first_index=first_index)
    write_model(
        output_path,
        ReconstructionOutput(
            coefficients=[
                CoefficientRecord(**record)
                for record in result.coefficients.to_records()
            ],
            residual_norm=result.residual_norm,
            unobservable=list(result.coefficients.unobservable),
            condition_number=result.condition_number,
        ),
    )


@cli.command("refpower")
@click.option("--input", "input_path", type=click.Path(path_type=Path), required=True)
@click.option("--output", "output_path", type=click.Path(path_type=Path), required=True)
@click.option("--aperture-radius-mm", type=float, default=None)
@click.option(
    "--histogram",
    "histogram_path",
    type=click.Path(path_type=Path),
    default=None,
    help="Also write the power distribution and print its summary.",
)
@click.option("--bins", type=int, default=settings.POWER_HISTOGRAM_BINS, show_default=True)
@click.option("--confidence", type=float, default=settings.CONFIDENCE_LEVEL, show_default=True)
@common_options
def refpower_cmd(
    input_path, output_path, aperture_radius_mm, histogram_path, bins, confidence, **_
):
    """Write refractive power maps Dx, Dy, Dxy of a wavefront map."""
    w = read_wavefront_csv(input_path, _optional_mm(aperture_radius_mm))
    maps = power_maps(w)
    write_power_csv(output_path, maps)
    if histogram_path is None:
        return
    statistics = [power_statistics(power, bins, confidence) for power in maps]
    write_power_histogram_csv(histogram_path, statistics)
    summaries = [
        PowerSummary(
            axis=stats.axis.value,
            mean_dpt=stats.mean,
            std_dpt=stats.std,
            interval_dpt=stats.interval,
            confidence=stats.confidence,
            samples=stats.sample_count,
        )
        for stats in statistics
    ]
    click.echo(json.dumps([summary.model_dump() for summary in summaries]))


@cli.command("mtf")
@click.option("--input", "input_path", type=click.Path(path_type=Path), default=None)
@click.option("--output", "output_path", type=click.Path(path_type=Path), required=True)
@click.option("--system", "system_path", type=click.Path(path_type=Path), default=None)
@click.option("--field-deg", type=float, default=0.0, show_default=True)
@click.option(
    "--orientation",
    type=click.Choice([o.value for o in Orientation]),
    default=Orientation.HORIZONTAL.value,
    show_default=True,
)
@click.option("--orientation-deg", type=float, default=None)
@click.option("--psd", "psd_path", type=click.Path(path_type=Path), default=None)
@click.option("--focal-length-mm", type=float, default=settings.DEFAULT_FOCAL_LENGTH_M / MM)
@click.option("--f-number", type=float, default=settings.DEFAULT_F_NUMBER)
@click.option("--aperture-radius-mm", type=float, default=None)
@click.option("--distance-mm", type=float, default=None)
@click.option("--samples", type=int, default=settings.MTF_FREQUENCY_SAMPLES, show_default=True)
@click.option(
    "--method",
    type=click.Choice([m.value for m in MTFMethod]),
    default=settings.MTF_METHOD,
    show_default=True,
)
@common_options
def mtf_cmd(
    input_path,
    output_path,
    system_path,
    field_deg,
    orientation,
    orientation_deg,
    psd_path,
    focal_length_mm,
    f_number,
    aperture_radius_mm,
    distance_mm,
    samples,
    method,
    lambda_nm,
    **_,
):
    """MTF of a coefficient file or of a lens plus windscreen system file."""
    if input_path is not None and system_path is not None:
        raise InputError("--input and --system are mutually exclusive")
    if system_path is not None:
        spec = read_system(system_path)
        lens = spec.lens.to_domain()
        ws = spec.windscreen.to_domain() if spec.windscreen else None
        c = system_coefficients(lens, ws, field_deg)
        pupil = lens.pupil
    elif input_path is not None:
        c = read_coefficients(input_path)
        pupil = _pupil(aperture_radius_mm, distance_mm, focal_length_mm, f_number)
    else:
        raise InputError("Either --input or --system is required")

    if samples < 2:
        raise InputError("--samples must be at least 2")
    psd = (
        read_psd_csv(psd_path)
        if psd_path is not None
        else SpectralDensity.monochromatic(lambda_nm * NM)
    )
    direction = (
        orientation_deg
        if orientation_deg is not None
        else Orientation(orientation).unit_vector
    )
    # the shortest wavelength has the highest cutoff
    reference_wavelength = float(np.min(psd.wavelengths))
    cutoff = pupil.cutoff(reference_wavelength)
    frequencies = np.linspace(0.0, cutoff, samples)
    curve = mtf_poly(
        c,
        pupil,
        psd,
        frequencies,
        direction,
        OverlapIntegrator(method=MTFMethod(method)),
    )
    frame = pd.DataFrame(
        {
            "freq_cyc_per_mm": curve.frequencies_cyc_per_mm,
            "mtf": curve.values,
        }
    )
    write_table(
        output_path,
        frame,
        {
            "lambda_m": " ".join(f"{v:.9g}" for v in psd.wavelengths),
            "orientation": f"{curve.orientation[0]:.6f} {curve.orientation[1]:.6f}",
        },
        float_format=MTF_FLOAT_FORMAT,
    )


@cli.command("sfr")
@click.option("--input", "input_path", type=click.Path(path_type=Path), required=True)
@click.option("--output", "output_path", type=click.Path(path_type=Path), required=True)
@click.option("--roi", type=str, default=None, help="row0,col0,rows,cols")
@click.option("--oversampling", type=int, default=settings.SFR_OVERSAMPLING, show_default=True)
@click.option(
    "--reference-frequency",
    type=float,
    default=settings.SFR_REFERENCE_FREQUENCY,
    show_default=True,
    help="Summary frequency in cycles per pixel.",
)
@common_options
def sfr_cmd(input_path, output_path, roi, oversampling, reference_frequency, **_):
    """Slanted-edge SFR of a PGM (or CSV raster) image."""
    region = None
    if roi is not None:
        try:
            region = tuple(int(v) for v in roi.split(","))
        except ValueError:
            raise InputError(f"Invalid --roi {roi!r}")
        if len(region) != 4 or min(region) < 0:
            raise InputError(f"Invalid --roi {roi!r}")
    image = EdgeImage(values=read_image(input_path))
    curve = estimate_sfr(image, region, oversampling, reference_frequency)
    write_table(
        output_path,
        pd.DataFrame({"freq_cyc_per_px": curve.frequencies, "sfr": curve.values}),
        {"angle_deg": f"{curve.angle_deg:.4f}", "oversampling": oversampling},
        float_format=MTF_FLOAT_FORMAT,
    )
    summary = SFRSummary(
        reference_frequency=reference_frequency,
        sfr_at_reference=curve.reference_value,
        angle_deg=curve.angle_deg,
        snr=_finite_or_none(curve.snr),
        mtf50=curve.mtf50(),
    )
    click.echo(summary.model_dump_json())


@cli.command("chart-sfr")
@click.option(
    "--input",
    "input_paths",
    type=click.Path(path_type=Path),
    multiple=True,
    required=True,
    help="Repeated frames of one chart; give the option once per frame.",
)
@click.option("--output", "output_path", type=click.Path(path_type=Path), required=True)
@click.option("--angle-deg", type=float, default=5.0, show_default=True)
@click.option("--half-side", type=int, default=None, help="Chart half side in pixels.")
@click.option("--roi-size", type=int, default=settings.CHART_ROI_SIZE_PX, show_default=True)
@click.option("--confidence", type=float, default=settings.CONFIDENCE_LEVEL, show_default=True)
@click.option(
    "--reference-frequency",
    type=float,
    default=settings.SFR_REFERENCE_FREQUENCY,
    show_default=True,
    help="Summary frequency in cycles per pixel.",
)
@common_options
def chart_sfr_cmd(
    input_paths,
    output_path,
    angle_deg,
    half_side,
    roi_size,
    confidence,
    reference_frequency,
    **_,
):
    """SFR of the four edges of a centred square chart over repeated frames."""
    frames = [EdgeImage(values=read_image(path)) for path in input_paths]
    shapes = {frame.shape for frame in frames}
    if len(shapes) != 1:
        raise InputError(f"Frames differ in shape: {sorted(shapes)}")
    rows, cols = shapes.pop()
    if rows != cols:
        raise InputError(f"Chart frames must be square, got {rows}x{cols}")
    rois = chart_rois(rows, half_side, angle_deg, roi_size)
    statistics = chart_statistics(
        frames, rois, confidence, reference_frequency=reference_frequency
    )
    summaries = [
        ChartSummary(
            label=stats.label,
            orientation=stats.orientation.value,
            mean=stats.mean,
            half_width=stats.half_width,
            confidence=stats.confidence,
            estimates=int(stats.samples.size),
        )
        for stats in statistics
    ]
    write_table(
        output_path,
        pd.DataFrame([summary.model_dump() for summary in summaries]),
        {"reference_frequency": reference_frequency, "frames": len(frames)},
        float_format=MTF_FLOAT_FORMAT,
    )


@cli.command("render-edge")
@click.option("--output", "output_path", type=click.Path(path_type=Path), required=True)
@click.option("--angle-deg", type=float, default=5.0, show_default=True)
@click.option("--size", type=int, default=128, show_default=True)
@click.option("--pixel-pitch-um", type=float, default=settings.DEFAULT_PIXEL_PITCH_M * 1e6)
@click.option("--sigma-px", type=float, default=None)
@click.option("--coefficients", "coefficients_path", type=click.Path(path_type=Path))
@click.option("--focal-length-mm", type=float, default=settings.DEFAULT_FOCAL_LENGTH_M / MM)
@click.option("--f-number", type=float, default=settings.DEFAULT_F_NUMBER)
@click.option("--noise", type=float, default=0.0, show_default=True)
@click.option("--ascii", "ascii_pgm", is_flag=True, help="Write P2 instead of P5.")
@click.option("--chart", is_flag=True, help="Render a slanted square with four edges.")
@click.option("--half-side", type=int, default=None, help="Chart half side in pixels.")
@common_options
def render_edge_cmd(
    output_path,
    angle_deg,
    size,
    pixel_pitch_um,
    sigma_px,
    coefficients_path,
    focal_length_mm,
    f_number,
    noise,
    ascii_pgm,
    chart,
    half_side,
    lambda_nm,
    seed,
    **_,
):
    """Render a synthetic slanted edge or four-edge chart as a 16-bit PGM."""
    if noise > 0.0 and seed is None:
        raise InputError("--seed is required when --noise is positive")
    psf = None
    if coefficients_path is not None:
        psf = psf_from_pupil(
            read_coefficients(coefficients_path),
            PupilSpec.from_lens(focal_length_mm * MM, f_number),
            lambda_nm * NM,
        )
    options = dict(
        angle_deg=angle_deg,
        size=size,
        pixel_pitch=pixel_pitch_um * 1e-6,
        sigma_px=sigma_px,
        psf=psf,
        noise=noise,
        seed=seed,
    )
    if chart:
        image = render_chart(half_side=half_side, **options)
    elif half_side is not None:
        raise InputError("--half-side needs --chart")
    else:
        image = render_edge(**options)
    write_pgm(output_path, to_counts(image.values), binary=not ascii_pgm)


@cli.command("system-mtf")
@click.option("--system", "system_path", type=click.Path(path_type=Path), required=True)
@click.option("--output", "output_path", type=click.Path(path_type=Path), required=True)
@click.option("--field-deg", type=float, default=0.0, show_default=True)
@click.option(
    "--orientation",
    type=click.Choice([o.value for o in Orientation]),
    default=Orientation.HORIZONTAL.value,
    show_default=True,
)
@click.option("--samples", type=int, default=settings.MTF_FREQUENCY_SAMPLES, show_default=True)
@common_options
def system_mtf_cmd(system_path, output_path, field_deg, orientation, samples, lambda_nm, **_):
    """Joint, lens-only and windscreen MTFs with the separability ratio."""
    spec = read_system(system_path)
    if spec.windscreen is None:
        raise InputError("System file has no windscreen")
    lens = spec.lens.to_domain()
    wavelength = lambda_nm * NM
    frequencies = np.linspace(0.0, lens.pupil.cutoff(wavelength), samples)
    report = separability_report(
        lens,
        spec.windscreen.to_domain(),
        field_deg,
        Orientation(orientation),
        wavelength,
        frequencies,
    )
    frame = pd.DataFrame(
        {
            "freq_cyc_per_mm": report.frequencies * MM,
            "mtf_joint": report.joint,
            "mtf_lens": report.lens,
            "mtf_ws": report.windscreen,
            "ratio": report.ratio,
        }
    )
    write_table(
        output_path,
        frame,
        {
            "cutoff_cyc_per_mm": f"{report.cutoff * MM:.6f}",
            "reference_cyc_per_mm": f"{report.reference_frequency * MM:.6f}",
            "joint_at_reference": f"{report.joint_at_reference:.6f}",
            "lens_at_reference": f"{report.lens_at_reference:.6f}",
            "max_deviation": f"{report.max_deviation:.6f}",
            "non_separable": str(report.non_separable).lower(),
            "sharpening": str(report.sharpening).lower(),
        },
        float_format=MTF_FLOAT_FORMAT,
    )


@cli.command("demo-blindspot")
@click.option("--output", "output_path", type=click.Path(path_type=Path), required=True)
@click.option("--amplitude-um", type=float, default=1.0, show_default=True)
@click.option("--aperture-radius-mm", type=float, default=50.0, show_default=True)
@common_options
def demo_blindspot_cmd(output_path, amplitude_um, aperture_radius_mm, grid, **_):
    """Trace of the power matrix versus the blur-ellipse proxy per Zernike index."""
    disk = DiskGrid(size=grid, aperture_radius=aperture_radius_mm * MM)
    rows = []
    for index in range(settings.MAX_ZERNIKE_INDEX + 1):
        c = ZernikeCoefficients.from_mapping({index: amplitude_um * 1e-6})
        w = synthesize(c, disk)
        trace = laplace_trace(w)
        proxy = blur_ellipse_proxy(w)
        rows.append(
            {
                "index": index,
                "harmonic": int(is_harmonic(index)),
                "trace_mean_dpt": trace.valid_mean(),
                "trace_max_abs_dpt": trace.valid_max_abs(),
                "proxy_mean_dpt2": proxy.valid_mean(),
            }
        )
    write_table(
        output_path,
        pd.DataFrame(rows),
        {"amplitude_um": amplitude_um, "aperture_radius_mm": aperture_radius_mm},
        float_format="%.6e",
    )


def main() -> None:
    cli()
