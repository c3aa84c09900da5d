"""Shack-Hartmann model, reconstruction and refractive-power maps."""
from typing import List, Tuple

import numpy as np
from loguru import logger

from windscreen_optics.config import settings
from windscreen_optics.domain.entities.enums import PowerAxis
from windscreen_optics.domain.entities.wavefront import (
    DioptricPowerMatrix,
    GradientField,
    PowerStatistics,
    Reconstruction,
    RefractivePowerMap,
    ScalarMap,
    WavefrontMap,
)
from windscreen_optics.domain.entities.zernike import (
    DiskGrid,
    DiskPoint,
    ZernikeCoefficients,
)
from windscreen_optics.domain.exceptions import (
    DegenerateLayoutError,
    InputError,
    InvalidPointError,
    NonPhysicalGradientError,
    ResolutionError,
)
from windscreen_optics.services.zernike import (
    check_index,
    wavefront_gradient,
    zernike_gradients,
)


def disk_lenslet_layout(count_across: int) -> np.ndarray:
    """Square lenslet grid with ``count_across`` cells, clipped to the unit disk."""
    centres = (np.arange(count_across) + 0.5) * 2.0 / count_across - 1.0
    x, y = np.meshgrid(centres, centres)
    inside = x * x + y * y <= 1.0
    return np.column_stack([x[inside], y[inside]])


def sh_forward(
    c: ZernikeCoefficients,
    lenslets: np.ndarray,
    lenslet_focal_length: float,
    aperture_radius: float,
) -> GradientField:
    """
    Spot displacements produced by a Zernike wavefront on a lenslet array.

    Args:
        c: Wavefront coefficients in meters
        lenslets: (m, 2) lenslet centres in normalized disk coordinates
        lenslet_focal_length: Lenslet focal length f_sh in meters
        aperture_radius: Physical aperture radius in meters

    Returns:
        Gradient field with displacements d = f_sh * beta / sqrt(1 - beta^2)

    Raises:
        NonPhysicalGradientError: If any slope component reaches |beta| >= 1
    """
    lenslets = np.asarray(lenslets, dtype=float)
    gx, gy = wavefront_gradient(c, lenslets[:, 0], lenslets[:, 1])
    beta = np.column_stack([gx, gy]) / aperture_radius
    if np.any(np.abs(beta) >= 1.0):
        raise NonPhysicalGradientError(
            f"Wavefront slope reaches |beta| = {np.max(np.abs(beta)):.3f} >= 1"
        )

    flagged = tuple(n for n in c.nonzero() if n < 4)
    if flagged:
        logger.warning(
            f"Coefficients {flagged} shift spots without blurring them; "
            f"they are modelled but not recovered by default"
        )

    displacements = lenslet_focal_length * beta / np.sqrt(1.0 - beta**2)
    return GradientField(
        positions=lenslets,
        displacements=displacements,
        lenslet_focal_length=lenslet_focal_length,
        aperture_radius=aperture_radius,
        flagged_indices=flagged,
    )


def add_displacement_noise(g: GradientField, sigma: float, seed: int) -> GradientField:
    """Add Gaussian displacement noise with standard deviation ``sigma`` meters."""
    rng = np.random.default_rng(seed)
    noisy = g.displacements + rng.normal(0.0, sigma, size=g.displacements.shape)
    return GradientField(
        positions=g.positions,
        displacements=noisy,
        lenslet_focal_length=g.lenslet_focal_length,
        aperture_radius=g.aperture_radius,
        flagged_indices=g.flagged_indices,
    )


def design_matrix(positions: np.ndarray, indices: List[int]) -> np.ndarray:
    """Stacked x-then-y Zernike gradients at the lenslet centres, shape (2m, K)."""
    columns = []
    for n in indices:
        gx, gy = zernike_gradients(n, positions[:, 0], positions[:, 1])
        columns.append(np.concatenate([gx, gy]))
    return np.column_stack(columns)


def _check_layout(positions: np.ndarray, tolerance: float) -> None:
    centred = positions - positions.mean(axis=0)
    _, singular, vt = np.linalg.svd(centred, full_matrices=True)
    spread = singular[0] if singular.size else 0.0
    if positions.shape[0] < 3 or singular.size < 2 or singular[1] <= tolerance * max(
        spread, 1e-300
    ):
        normal = [float(v) for v in vt[-1]]
        raise DegenerateLayoutError(
            "Lenslet centres are collinear; slopes across the line "
            f"direction ({normal[0]:.3f}, {normal[1]:.3f}) are unconstrained",
            directions=[{"across_line": normal}],
        )


def _deficient_directions(gram: np.ndarray, indices: List[int], limit: float) -> list:
    eigenvalues, eigenvectors = np.linalg.eigh(gram)
    floor = eigenvalues[-1] / limit
    directions = []
    for value, vector in zip(eigenvalues, eigenvectors.T):
        if value <= floor:
            weights = {
                f"c{n}": round(float(w), 6)
                for n, w in zip(indices, vector)
                if abs(w) > 1e-3
            }
            directions.append(weights)
    return directions


def reconstruct(
    g: GradientField,
    max_index: int,
    first_index: int = settings.DEFAULT_FIRST_INDEX,
    condition_limit: float = settings.GRAMIAN_CONDITION_LIMIT,
) -> Reconstruction:
    """
    Least-squares Zernike coefficients from Shack-Hartmann displacements.

    Solves beta = (1/rho_a) M c for c_first..c_max with an orthogonal
    factorization; the Gramian M^T M is only used for the condition check.

    Args:
        g: Measured gradient field
        max_index: Highest ANSI index to fit
        first_index: Lowest fitted index, 4 by default (1 makes tilt observable)
        condition_limit: Largest accepted Gramian condition number

    Returns:
        Reconstruction with coefficients c_0..c_max; unfitted indices are zero
        and listed as unobservable

    Raises:
        DegenerateLayoutError: If the layout leaves coefficient directions
            unconstrained
    """
    check_index(max_index)
    if not 1 <= first_index <= min(4, max_index):
        raise InputError(f"first_index must lie in 1..{min(4, max_index)}")
    indices = list(range(first_index, max_index + 1))
    if 2 * g.count < len(indices):
        raise DegenerateLayoutError(
            f"{g.count} lenslets give {2 * g.count} slopes for "
            f"{len(indices)} unknowns",
            directions=[],
        )
    _check_layout(g.positions, settings.COLLINEARITY_TOLERANCE)

    matrix = design_matrix(g.positions, indices)
    gram = matrix.T @ matrix
    condition = float(np.linalg.cond(gram))
    if not np.isfinite(condition) or condition > condition_limit:
        directions = _deficient_directions(gram, indices, condition_limit)
        raise DegenerateLayoutError(
            f"Gramian condition number {condition:.3e} exceeds {condition_limit:.1e}",
            directions=directions,
        )

    beta = g.beta
    rhs = np.concatenate([beta[:, 0], beta[:, 1]])
    solution, _, _, _ = np.linalg.lstsq(matrix, rhs, rcond=None)
    residual = float(np.linalg.norm(matrix @ solution - rhs))

    values = np.zeros(max_index + 1)
    values[first_index:] = g.aperture_radius * solution
    logger.debug(
        f"Reconstructed Z{first_index}..Z{max_index} from {g.count} lenslets, "
        f"cond {condition:.2e}, residual {residual:.3e}"
    )
    return Reconstruction(
        coefficients=ZernikeCoefficients(
            values=values, unobservable=tuple(range(first_index))
        ),
        residual_norm=residual,
        condition_number=condition,
        fitted_indices=tuple(indices),
    )


def _check_power_resolution(w: WavefrontMap, min_samples: int) -> None:
    if min(w.shape) < min_samples:
        raise ResolutionError(
            f"Map has {min(w.shape)} samples across the aperture, "
            f"at least {min_samples} are required for second differences"
        )


def _second_difference(values: np.ndarray, axis: PowerAxis, h: float) -> np.ndarray:
    out = np.full(values.shape, np.nan)
    if axis is PowerAxis.X:
        out[:, 1:-1] = values[:, 2:] - 2.0 * values[:, 1:-1] + values[:, :-2]
    elif axis is PowerAxis.Y:
        out[1:-1, :] = values[2:, :] - 2.0 * values[1:-1, :] + values[:-2, :]
    else:
        out[1:-1, 1:-1] = 0.25 * (
            values[2:, 2:] - values[2:, :-2] - values[:-2, 2:] + values[:-2, :-2]
        )
    return out / (h * h)


def refractive_power(
    w: WavefrontMap,
    axis: PowerAxis,
    min_samples: int = settings.MIN_POWER_SAMPLES,
) -> RefractivePowerMap:
    """
    Refractive power as the second derivative of W in physical coordinates.

    Central differences with spacing h * rho_a; samples whose stencil leaves
    the valid region are NaN.

    Args:
        w: Wavefront map in meters
        axis: x, y or the mixed xy derivative
        min_samples: Minimum samples across the aperture

    Returns:
        Power map in diopters
    """
    axis = PowerAxis(axis)
    _check_power_resolution(w, min_samples)
    values = _second_difference(w.values, axis, w.physical_spacing)
    return RefractivePowerMap(
        values=values, x=w.x, y=w.y, aperture_radius=w.aperture_radius, axis=axis
    )


def power_maps(
    w: WavefrontMap,
) -> Tuple[RefractivePowerMap, RefractivePowerMap, RefractivePowerMap]:
    """D_x, D_y and D_xy maps on a common validity mask."""
    maps = [refractive_power(w, axis) for axis in PowerAxis]
    common = maps[0].mask & maps[1].mask & maps[2].mask
    return tuple(
        RefractivePowerMap(
            values=np.where(common, m.values, np.nan),
            x=m.x,
            y=m.y,
            aperture_radius=m.aperture_radius,
            axis=m.axis,
        )
        for m in maps
    )


def power_statistics(
    power: RefractivePowerMap,
    bins: int = settings.POWER_HISTOGRAM_BINS,
    confidence: float = settings.CONFIDENCE_LEVEL,
) -> PowerStatistics:
    """
    Histogram of the local power values with their expectation and spread.

    The expectation is the mean over all valid samples; the interval spans
    the central ``confidence`` fraction of the local values.

    Args:
        power: Refractive power map in diopters
        bins: Histogram bins between the smallest and largest value
        confidence: Fraction of local values inside the interval

    Returns:
        Power distribution summary

    Raises:
        InputError: If fewer than two samples are valid or the settings are invalid
    """
    if bins < 1:
        raise InputError(f"Histogram needs at least one bin, got {bins}")
    if not 0.0 < confidence < 1.0:
        raise InputError(f"Confidence must lie in (0, 1), got {confidence}")
    values = power.values[power.mask]
    if values.size < 2:
        raise InputError(f"Power map D{power.axis.value} has {values.size} valid samples")
    counts, edges = np.histogram(values, bins=bins)
    tail = 0.5 * (1.0 - confidence)
    low, high = np.quantile(values, [tail, 1.0 - tail])
    mean = float(np.mean(values))
    logger.debug(
        f"D{power.axis.value}: {values.size} samples, mean {mean:.4f} dpt, "
        f"{confidence:.0%} of values in [{low:.4f}, {high:.4f}] dpt"
    )
    return PowerStatistics(
        axis=power.axis,
        bin_edges=edges,
        counts=counts,
        mean=mean,
        std=float(np.std(values, ddof=1)),
        interval=(float(low), float(high)),
        confidence=confidence,
    )


def dioptric_matrix(w: WavefrontMap, point: DiskPoint) -> DioptricPowerMatrix:
    """
    Hessian of W at the grid node nearest to ``point``.

    Raises:
        InvalidPointError: If the node lacks a full finite stencil
    """
    j = int(np.argmin(np.abs(w.x - point.x)))
    i = int(np.argmin(np.abs(w.y - point.y)))
    rows, cols = w.shape
    if not (0 < i < rows - 1 and 0 < j < cols - 1):
        raise InvalidPointError(f"Point ({point.x}, {point.y}) is on the grid border")

    patch = w.values[i - 1 : i + 2, j - 1 : j + 2]
    if not np.all(np.isfinite(patch)):
        raise InvalidPointError(
            f"Point ({point.x}, {point.y}) has no full stencil inside the map"
        )
    h2 = w.physical_spacing**2
    dxx = (patch[1, 2] - 2.0 * patch[1, 1] + patch[1, 0]) / h2
    dyy = (patch[2, 1] - 2.0 * patch[1, 1] + patch[0, 1]) / h2
    dxy = 0.25 * (patch[2, 2] - patch[2, 0] - patch[0, 2] + patch[0, 0]) / h2
    return DioptricPowerMatrix(
        matrix=[[dxx, dxy], [dxy, dyy]], x=float(w.x[j]), y=float(w.y[i])
    )


def blur_ellipse_proxy(w: WavefrontMap) -> ScalarMap:
    """Determinant of the Hessian of W, in diopters squared."""
    dx, dy, dxy = power_maps(w)
    return ScalarMap(
        values=dx.values * dy.values - dxy.values**2,
        x=w.x,
        y=w.y,
        aperture_radius=w.aperture_radius,
        unit="dpt^2",
    )


def laplace_trace(w: WavefrontMap) -> ScalarMap:
    """Trace of the dioptric power matrix, D_x + D_y, in diopters."""
    dx = refractive_power(w, PowerAxis.X)
    dy = refractive_power(w, PowerAxis.Y)
    return ScalarMap(
        values=dx.values + dy.values,
        x=w.x,
        y=w.y,
        aperture_radius=w.aperture_radius,
        unit="dpt",
    )


def thin_lens_wavefront(power: float, grid: DiskGrid) -> WavefrontMap:
    """
    Exact sag of a thin lens of refractive power ``power`` over the aperture.

    W = f - sign(f) * sqrt(f^2 - r^2) with f = 1 / power, which tends to
    power * r^2 / 2 for small apertures.
    """
    if power == 0.0:
        return WavefrontMap.from_function(lambda x, y: np.zeros_like(x), grid)
    focal = 1.0 / power
    if abs(focal) <= grid.aperture_radius:
        raise InputError(
            f"Focal length {focal:.4g} m is shorter than the aperture radius"
        )

    def sag(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        r2 = (x * x + y * y) * grid.aperture_radius**2
        root = np.sqrt(focal * focal - r2)
        return r2 / (focal + np.sign(focal) * root)

    return WavefrontMap.from_function(sag, grid)
