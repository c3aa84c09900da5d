"""Synthetic slanted-edge targets and slanted-edge SFR estimation."""
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy.special import ndtr

from windscreen_optics.config import settings
from windscreen_optics.domain.entities.enums import ChartEdge, Orientation
from windscreen_optics.domain.entities.mtf import PSFGrid
from windscreen_optics.domain.entities.sfr import EdgeImage, SFRCurve, SFRStatistic
from windscreen_optics.domain.exceptions import (
    GeometryError,
    InputError,
    MeasurementValidityError,
)
from windscreen_optics.services.quadrature import gauss_legendre

Roi = Tuple[int, int, int, int]

GAUSSIAN_ENERGY_RADIUS = np.sqrt(-2.0 * np.log(0.05))
ESF_TABLE_STEP_PX = 1.0 / 64.0
# half diagonal of a pixel, rounded up
PIXEL_REACH_PX = 0.75
GAUSSIAN_REACH_SIGMAS = 8.0


def _ramp_integral(t: np.ndarray) -> np.ndarray:
    return 0.5 * np.maximum(t, 0.0) ** 2


def pixel_aperture_step(d: np.ndarray, angle_deg: float) -> np.ndarray:
    """
    Fraction of a square pixel on the bright side of a straight edge.

    Averaging the step over the pixel aperture projected onto the edge normal
    is the CDF of a sum of two uniforms with half widths |cos|/2 and |sin|/2.

    Args:
        d: Signed normal distance of the pixel centre to the edge, in pixels
        angle_deg: Edge angle from vertical

    Returns:
        Coverage in [0, 1]
    """
    theta = np.radians(angle_deg)
    a = 0.5 * abs(np.cos(theta))
    b = 0.5 * abs(np.sin(theta))
    if b < 1e-12:
        return np.clip((d + a) / (2.0 * a), 0.0, 1.0)
    return (
        _ramp_integral(d + a + b)
        - _ramp_integral(d + a - b)
        - _ramp_integral(d - a + b)
        + _ramp_integral(d - a - b)
    ) / (4.0 * a * b)


def _aperture_average(
    esf: Callable[[np.ndarray], np.ndarray], d: np.ndarray, angle_deg: float
) -> np.ndarray:
    theta = np.radians(angle_deg)
    nodes, weights = gauss_legendre(settings.EDGE_RENDER_NODES, -0.5, 0.5)
    total = np.zeros_like(d)
    for u, wu in zip(nodes, weights):
        shifted = d[..., None] + u * np.cos(theta) - nodes * np.sin(theta)
        total += wu * np.sum(weights * esf(shifted), axis=-1)
    return total


def _psf_esf(psf: PSFGrid, pixel_pitch: float, angle_deg: float):
    """Edge spread of a PSF grid along the edge normal, in image pixels."""
    theta = np.radians(angle_deg)
    centre = psf.size // 2
    coords = (np.arange(psf.size) - centre) * psf.pixel_pitch / pixel_pitch
    x, y = np.meshgrid(coords, coords)
    projected = (x * np.cos(theta) - y * np.sin(theta)).ravel()
    edges = np.arange(
        projected.min() - ESF_TABLE_STEP_PX,
        projected.max() + 2.0 * ESF_TABLE_STEP_PX,
        ESF_TABLE_STEP_PX,
    )
    lsf, _ = np.histogram(projected, bins=edges, weights=psf.values.ravel())
    cdf = np.concatenate([[0.0], np.cumsum(lsf)]) / np.sum(lsf)

    def esf(d: np.ndarray) -> np.ndarray:
        return np.interp(d, edges, cdf, left=0.0, right=1.0)

    return esf


def _psf_energy_diameter(psf: PSFGrid, pixel_pitch: float) -> float:
    coords = np.arange(psf.size) * psf.pixel_pitch / pixel_pitch
    x, y = np.meshgrid(coords, coords)
    weights = psf.values / np.sum(psf.values)
    cx, cy = np.sum(weights * x), np.sum(weights * y)
    radius = np.hypot(x - cx, y - cy).ravel()
    order = np.argsort(radius)
    energy = np.cumsum(weights.ravel()[order])
    return 2.0 * float(radius[order][np.searchsorted(energy, 0.95)])


def _check_render(
    angle_deg: float,
    size: int,
    sigma_px: Optional[float],
    psf: Optional[PSFGrid],
    noise: float,
    seed: Optional[int],
) -> None:
    if not settings.SFR_MIN_ANGLE_DEG <= abs(angle_deg) <= settings.SFR_MAX_ANGLE_DEG:
        raise InputError(
            f"Edge angle {angle_deg} deg is outside "
            f"[{settings.SFR_MIN_ANGLE_DEG}, {settings.SFR_MAX_ANGLE_DEG}]"
        )
    if size < settings.MIN_EDGE_IMAGE_SIZE:
        raise InputError(
            f"Image size {size} is below {settings.MIN_EDGE_IMAGE_SIZE} pixels"
        )
    if sigma_px is not None and psf is not None:
        raise InputError("Give either a Gaussian sigma or a PSF grid, not both")
    if sigma_px is not None and sigma_px < 0.0:
        raise InputError("Gaussian sigma must be non-negative")
    if noise < 0.0:
        raise InputError("Noise must be non-negative")
    if noise > 0.0 and seed is None:
        raise InputError("A seed is required for noisy renders")


def _blurred_step(
    size: int, pixel_pitch: float, sigma_px: Optional[float], psf: Optional[PSFGrid]
) -> Callable[[np.ndarray, float], np.ndarray]:
    """Pixel-integrated coverage of a blurred straight edge as f(d, angle_deg)."""
    if psf is not None:
        diameter = _psf_energy_diameter(psf, pixel_pitch)
        if diameter > size:
            raise GeometryError(
                f"PSF 95% energy diameter {diameter:.1f} px exceeds the image"
            )
        reach = PIXEL_REACH_PX + psf.size * psf.pixel_pitch / pixel_pitch

        def coverage(d, angle_deg):
            esf = _psf_esf(psf, pixel_pitch, angle_deg)
            return _near_edge(d, reach, lambda t: _aperture_average(esf, t, angle_deg))

        return coverage
    if sigma_px:
        diameter = 2.0 * GAUSSIAN_ENERGY_RADIUS * sigma_px
        if diameter > size:
            raise GeometryError(
                f"Gaussian 95% energy diameter {diameter:.1f} px exceeds the image"
            )
        reach = PIXEL_REACH_PX + GAUSSIAN_REACH_SIGMAS * sigma_px

        def coverage(d, angle_deg):
            return _near_edge(
                d,
                reach,
                lambda t: _aperture_average(lambda s: ndtr(s / sigma_px), t, angle_deg),
            )

        return coverage
    return pixel_aperture_step


def _near_edge(d: np.ndarray, reach: float, average) -> np.ndarray:
    # beyond ``reach`` the pixel sees only one side of the blurred edge
    coverage = (d > 0.0).astype(float)
    near = np.abs(d) < reach
    coverage[near] = average(d[near])
    return coverage


def render_edge(
    angle_deg: float = 5.0,
    size: int = 128,
    pixel_pitch: float = settings.DEFAULT_PIXEL_PITCH_M,
    sigma_px: Optional[float] = None,
    psf: Optional[PSFGrid] = None,
    noise: float = 0.0,
    seed: Optional[int] = None,
    levels: Tuple[float, float] = (
        settings.EDGE_DARK_LEVEL,
        settings.EDGE_BRIGHT_LEVEL,
    ),
) -> EdgeImage:
    """
    Render a blurred slanted step edge integrated over square pixels.

    The edge passes through the image centre, tilted ``angle_deg`` from
    vertical; pixels on its right side take the bright level. Blur comes
    from a Gaussian of ``sigma_px`` pixels or from a PSF grid, never both.

    Args:
        angle_deg: Edge angle from vertical, within the measurable range
        size: Image side in pixels, at least 64
        pixel_pitch: Pixel pitch in meters
        sigma_px: Gaussian blur in pixels
        psf: PSF grid from the pupil model
        noise: Additive Gaussian noise standard deviation, full scale = 1
        seed: Random seed, required when noise is positive
        levels: (dark, bright) intensity levels

    Returns:
        Rendered edge image

    Raises:
        InputError: If the angle, size or noise settings are invalid
        GeometryError: If the blur is wider than the image
    """
    _check_render(angle_deg, size, sigma_px, psf, noise, seed)
    step = _blurred_step(size, pixel_pitch, sigma_px, psf)

    centre = 0.5 * (size - 1)
    theta = np.radians(angle_deg)
    cols, rows = np.meshgrid(np.arange(size, dtype=float), np.arange(size, dtype=float))
    d = (cols - centre) * np.cos(theta) - (rows - centre) * np.sin(theta)
    coverage = step(d, angle_deg)

    dark, bright = levels
    values = dark + (bright - dark) * coverage
    if noise > 0.0:
        values = values + np.random.default_rng(seed).normal(0.0, noise, values.shape)
    return EdgeImage(values=values, pixel_pitch=pixel_pitch, angle_deg=angle_deg)


def _edge_centroids(data: np.ndarray, half_width: int):
    derivative = np.abs(np.gradient(data, axis=1))
    cols = np.arange(data.shape[1])
    peaks = np.argmax(derivative, axis=1)
    window = np.abs(cols[None, :] - peaks[:, None]) <= half_width
    weights = derivative * window
    total = weights.sum(axis=1)
    valid = total > 0.0
    centroids = np.full(data.shape[0], np.nan)
    centroids[valid] = (weights[valid] @ cols) / total[valid]
    return centroids, valid


def _signal_to_noise(data: np.ndarray, distance: np.ndarray) -> float:
    reach = 0.25 * data.shape[1]
    dark = data[distance <= -reach]
    bright = data[distance >= reach]
    if dark.size < 2 or bright.size < 2:
        raise MeasurementValidityError(
            "ROI has no flat region on one side of the edge"
        )
    contrast = abs(float(np.mean(bright) - np.mean(dark)))
    residual = np.concatenate([dark - np.mean(dark), bright - np.mean(bright)])
    noise = float(np.std(residual))
    if noise == 0.0:
        return np.inf if contrast > 0.0 else 0.0
    return contrast / noise


def _bin_edge_profile(data: np.ndarray, distance: np.ndarray, oversampling: int):
    bins = np.round(distance * oversampling).astype(int).ravel()
    bins -= bins.min()
    counts = np.bincount(bins)
    sums = np.bincount(bins, weights=data.ravel())
    filled = counts > 0
    esf = np.zeros(counts.size)
    esf[filled] = sums[filled] / counts[filled]
    if not np.all(filled):
        index = np.arange(counts.size)
        esf[~filled] = np.interp(index[~filled], index[filled], esf[filled])
    return esf


def estimate_sfr(
    image: EdgeImage,
    roi: Optional[Roi] = None,
    oversampling: int = settings.SFR_OVERSAMPLING,
    reference_frequency: float = settings.SFR_REFERENCE_FREQUENCY,
) -> SFRCurve:
    """
    Estimate the SFR of a slanted edge.

    Per-row derivative centroids are regressed to a straight edge; pixels are
    projected onto the edge normal and binned at ``oversampling`` bins per
    pixel. The binned edge profile is differentiated, Hamming-windowed around
    its peak and Fourier transformed. Finite-difference and bin-width
    transfer factors are divided out; the pixel aperture is kept.

    Args:
        image: Edge image
        roi: (row0, col0, rows, cols) region of interest, default whole image
        oversampling: Bins per pixel along the edge normal
        reference_frequency: Frequency of the summary value, cycles per pixel

    Returns:
        SFR curve up to the configured maximum frequency

    Raises:
        MeasurementValidityError: If the angle, margin or SNR is out of range
    """
    if roi is not None:
        image = image.crop(*roi)
    data = np.asarray(image.values, dtype=float)
    if min(data.shape) < 2 * settings.SFR_EDGE_MARGIN_PX + 2:
        raise MeasurementValidityError(f"ROI {data.shape} is too small")

    horizontal = np.abs(np.diff(data, axis=1)).sum()
    vertical = np.abs(np.diff(data, axis=0)).sum()
    if vertical > horizontal:
        logger.debug("Edge is near-horizontal, transposing ROI")
        data = data.T

    centroids, valid = _edge_centroids(data, settings.SFR_CENTROID_HALF_WIDTH_PX)
    if np.count_nonzero(valid) < 2:
        raise MeasurementValidityError("No edge found in the ROI")
    rows = np.arange(data.shape[0])
    slope, intercept = np.polyfit(rows[valid], centroids[valid], 1)
    angle = float(np.degrees(np.arctan(slope)))

    grid_cols, grid_rows = np.meshgrid(np.arange(data.shape[1]), rows)
    distance = (grid_cols - (intercept + slope * grid_rows)) * np.cos(np.arctan(slope))

    snr = _signal_to_noise(data, distance)
    if snr < settings.SFR_MIN_SNR:
        raise MeasurementValidityError(
            f"Edge SNR {snr:.1f} is below {settings.SFR_MIN_SNR:.0f}:1",
            details={"snr": snr},
        )
    if not settings.SFR_MIN_ANGLE_DEG <= abs(angle) <= settings.SFR_MAX_ANGLE_DEG:
        raise MeasurementValidityError(
            f"Edge angle {angle:.2f} deg is outside "
            f"[{settings.SFR_MIN_ANGLE_DEG}, {settings.SFR_MAX_ANGLE_DEG}]",
            details={"angle_deg": angle},
        )
    ends = intercept + slope * np.array([0.0, data.shape[0] - 1.0])
    margin = settings.SFR_EDGE_MARGIN_PX
    if ends.min() < margin or ends.max() > data.shape[1] - 1 - margin:
        raise MeasurementValidityError(
            f"Edge is closer than {margin} px to the ROI border"
        )

    esf = _bin_edge_profile(data, distance, oversampling)
    lsf = np.gradient(esf)
    if lsf.sum() < 0.0:
        lsf = -lsf
    peak = int(np.argmax(lsf))
    half = min(
        peak, lsf.size - 1 - peak, settings.SFR_WINDOW_HALF_WIDTH_PX * oversampling
    )
    windowed = np.zeros_like(lsf)
    span = slice(peak - half, peak + half + 1)
    windowed[span] = lsf[span] * np.hamming(2 * half + 1)

    nfft = max(1024, 1 << int(np.ceil(np.log2(lsf.size))))
    spectrum = np.abs(np.fft.rfft(windowed, nfft))
    spectrum = spectrum / spectrum[0]
    frequencies = np.fft.rfftfreq(nfft, d=1.0 / oversampling)
    keep = frequencies <= settings.SFR_MAX_FREQUENCY
    frequencies, spectrum = frequencies[keep], spectrum[keep]

    step = 1.0 / oversampling
    transfer = np.sinc(2.0 * frequencies * step) * np.sinc(frequencies * step)
    values = spectrum / np.clip(transfer, 0.1, None)

    logger.debug(
        f"SFR from {data.shape} ROI: angle {angle:.2f} deg, SNR {snr:.1f}, "
        f"{frequencies.size} frequencies"
    )
    return SFRCurve(
        frequencies=frequencies,
        values=values,
        angle_deg=angle,
        snr=float(snr),
        reference_frequency=reference_frequency,
    )


def _side_normal(edge: ChartEdge, angle_deg: float) -> float:
    return angle_deg + 90.0 * edge.quarter_turns


def render_chart(
    angle_deg: float = 5.0,
    size: int = 256,
    half_side: Optional[int] = None,
    pixel_pitch: float = settings.DEFAULT_PIXEL_PITCH_M,
    sigma_px: Optional[float] = None,
    psf: Optional[PSFGrid] = None,
    noise: float = 0.0,
    seed: Optional[int] = None,
    levels: Tuple[float, float] = (
        settings.EDGE_DARK_LEVEL,
        settings.EDGE_BRIGHT_LEVEL,
    ),
) -> EdgeImage:
    """
    Render a dark square rotated by ``angle_deg`` on a bright background.

    Its left and right sides are slanted edges for the horizontal direction,
    its top and bottom sides for the vertical one. Away from the corners
    every side matches ``render_edge`` with the same blur.

    Args:
        angle_deg: Rotation of the square, within the measurable edge range
        size: Image side in pixels
        half_side: Half the square side in pixels, default a quarter of ``size``
        pixel_pitch: Pixel pitch in meters
        sigma_px: Gaussian blur in pixels
        psf: PSF grid from the pupil model
        noise: Additive Gaussian noise standard deviation, full scale = 1
        seed: Random seed, required when noise is positive
        levels: (dark, bright) intensity levels

    Returns:
        Chart image

    Raises:
        InputError: If the angle, size or noise settings are invalid
        GeometryError: If the square or the blur does not fit the image
    """
    _check_render(angle_deg, size, sigma_px, psf, noise, seed)
    half_side = size // 4 if half_side is None else half_side
    theta = np.radians(angle_deg)
    footprint = half_side * (abs(np.cos(theta)) + abs(np.sin(theta)))
    if half_side <= 0 or footprint >= 0.5 * (size - 1):
        raise GeometryError(f"Square of half side {half_side} px does not fit the image")
    step = _blurred_step(size, pixel_pitch, sigma_px, psf)

    centre = 0.5 * (size - 1)
    cols, rows = np.meshgrid(np.arange(size, dtype=float), np.arange(size, dtype=float))
    inside = np.ones((size, size))
    for edge in ChartEdge:
        normal = _side_normal(edge, angle_deg)
        phi = np.radians(normal)
        d = (cols - centre) * np.cos(phi) - (rows - centre) * np.sin(phi) - half_side
        inside *= 1.0 - step(d, normal)

    dark, bright = levels
    values = bright - (bright - dark) * inside
    if noise > 0.0:
        values = values + np.random.default_rng(seed).normal(0.0, noise, values.shape)
    return EdgeImage(values=values, pixel_pitch=pixel_pitch, angle_deg=angle_deg)


def chart_rois(
    size: int,
    half_side: Optional[int] = None,
    angle_deg: float = 5.0,
    roi_size: int = settings.CHART_ROI_SIZE_PX,
) -> Dict[ChartEdge, Roi]:
    """
    Square regions centred on the four side midpoints of a rendered chart.

    Args:
        size: Image side in pixels
        half_side: Half the square side in pixels, default a quarter of ``size``
        angle_deg: Rotation of the square
        roi_size: Side of each region in pixels

    Returns:
        (row0, col0, rows, cols) per chart edge

    Raises:
        GeometryError: If a region reaches a corner or leaves the image
    """
    half_side = size // 4 if half_side is None else half_side
    if roi_size > half_side:
        raise GeometryError(
            f"ROI of {roi_size} px reaches the corners of a square of half side "
            f"{half_side} px"
        )
    centre = 0.5 * (size - 1)
    rois = {}
    for edge in ChartEdge:
        phi = np.radians(_side_normal(edge, angle_deg))
        row = centre - half_side * np.sin(phi)
        col = centre + half_side * np.cos(phi)
        row0 = int(round(row - 0.5 * (roi_size - 1)))
        col0 = int(round(col - 0.5 * (roi_size - 1)))
        if min(row0, col0) < 0 or max(row0, col0) + roi_size > size:
            raise GeometryError(f"ROI of the {edge.value} edge leaves the image")
        rois[edge] = (row0, col0, roi_size, roi_size)
    return rois


def chart_statistics(
    frames: Sequence[EdgeImage],
    rois: Dict[ChartEdge, Roi],
    confidence: float = settings.CONFIDENCE_LEVEL,
    oversampling: int = settings.SFR_OVERSAMPLING,
    reference_frequency: float = settings.SFR_REFERENCE_FREQUENCY,
) -> List[SFRStatistic]:
    """
    Reference-frequency SFR of every chart edge over repeated frames.

    Each frame gives one estimate per edge. The result lists one statistic per
    edge, then one per orientation pooling the estimates of its two edges.

    Args:
        frames: Repeated images of the same chart
        rois: Region of interest per edge, e.g. from ``chart_rois``
        confidence: Coverage of the interval around the mean
        oversampling: Bins per pixel along the edge normal
        reference_frequency: Frequency of the summary value, cycles per pixel

    Returns:
        Edge statistics followed by orientation statistics

    Raises:
        InputError: If fewer than two frames are given
        MeasurementValidityError: If any edge estimate is invalid
    """
    if len(frames) < 2:
        raise InputError(f"Repeated estimates need at least two frames, got {len(frames)}")
    if not 0.0 < confidence < 1.0:
        raise InputError(f"Confidence must lie in (0, 1), got {confidence}")
    samples = {
        edge: [
            estimate_sfr(frame, roi, oversampling, reference_frequency).reference_value
            for frame in frames
        ]
        for edge, roi in rois.items()
    }
    statistics = [
        SFRStatistic(
            label=edge.value,
            orientation=edge.orientation,
            samples=values,
            confidence=confidence,
        )
        for edge, values in samples.items()
    ]
    for orientation in Orientation:
        pooled = [
            value
            for edge, values in samples.items()
            if edge.orientation is orientation
            for value in values
        ]
        if pooled:
            statistics.append(
                SFRStatistic(
                    label=orientation.value,
                    orientation=orientation,
                    samples=pooled,
                    confidence=confidence,
                )
            )
    for statistic in statistics:
        logger.debug(
            f"{statistic.label}: SFR {statistic.mean:.4f} +- {statistic.half_width:.4f} "
            f"[{confidence:.0%}] over {statistic.samples.size} estimates"
        )
    return statistics
