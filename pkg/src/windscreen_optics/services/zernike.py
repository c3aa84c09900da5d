"""Zernike basis up to third order, ANSI linear indexing.

Cartesian closed forms are canonical; polar forms exist for cross-checks.
Coordinates are normalized to the unit disk.
"""
from typing import Callable, Dict, Tuple

import numpy as np
from loguru import logger

from windscreen_optics.config import settings
from windscreen_optics.domain.entities.wavefront import WavefrontMap
from windscreen_optics.domain.entities.zernike import (
    DISK_TOLERANCE,
    DiskGrid,
    DiskPoint,
    ZernikeCoefficients,
)
from windscreen_optics.domain.exceptions import (
    DiskDomainError,
    ResolutionError,
    UnsupportedOrderError,
)
from windscreen_optics.services.quadrature import (
    DiskFunction,
    DiskQuadrature,
    integrate_checked,
)

SQRT3 = np.sqrt(3.0)
SQRT6 = np.sqrt(6.0)
SQRT8 = np.sqrt(8.0)

HARMONIC_INDICES = frozenset({0, 1, 2, 3, 5, 6, 9})

Array = np.ndarray
Pair = Tuple[Array, Array]

_VALUES: Dict[int, Callable[[Array, Array], Array]] = {
    0: lambda x, y: np.ones_like(x),
    1: lambda x, y: 2.0 * y,
    2: lambda x, y: 2.0 * x,
    3: lambda x, y: 2.0 * SQRT6 * x * y,
    4: lambda x, y: SQRT3 * (2.0 * x**2 + 2.0 * y**2 - 1.0),
    5: lambda x, y: SQRT6 * (x**2 - y**2),
    6: lambda x, y: SQRT8 * (3.0 * x**2 * y - y**3),
    7: lambda x, y: SQRT8 * (3.0 * x**2 * y + 3.0 * y**3 - 2.0 * y),
    8: lambda x, y: SQRT8 * (3.0 * x**3 + 3.0 * x * y**2 - 2.0 * x),
    9: lambda x, y: SQRT8 * (x**3 - 3.0 * x * y**2),
}

_GRADIENTS: Dict[int, Callable[[Array, Array], Pair]] = {
    0: lambda x, y: (np.zeros_like(x), np.zeros_like(x)),
    1: lambda x, y: (np.zeros_like(x), np.full_like(x, 2.0)),
    2: lambda x, y: (np.full_like(x, 2.0), np.zeros_like(x)),
    3: lambda x, y: (2.0 * SQRT6 * y, 2.0 * SQRT6 * x),
    4: lambda x, y: (4.0 * SQRT3 * x, 4.0 * SQRT3 * y),
    5: lambda x, y: (2.0 * SQRT6 * x, -2.0 * SQRT6 * y),
    6: lambda x, y: (6.0 * SQRT8 * x * y, SQRT8 * (3.0 * x**2 - 3.0 * y**2)),
    7: lambda x, y: (
        6.0 * SQRT8 * x * y,
        SQRT8 * (3.0 * x**2 + 9.0 * y**2 - 2.0),
    ),
    8: lambda x, y: (
        SQRT8 * (9.0 * x**2 + 3.0 * y**2 - 2.0),
        6.0 * SQRT8 * x * y,
    ),
    9: lambda x, y: (SQRT8 * (3.0 * x**2 - 3.0 * y**2), -6.0 * SQRT8 * x * y),
}

_POLAR: Dict[int, Callable[[Array, Array], Array]] = {
    0: lambda r, p: np.ones_like(r),
    1: lambda r, p: 2.0 * r * np.sin(p),
    2: lambda r, p: 2.0 * r * np.cos(p),
    3: lambda r, p: SQRT6 * r**2 * np.sin(2.0 * p),
    4: lambda r, p: SQRT3 * (2.0 * r**2 - 1.0),
    5: lambda r, p: SQRT6 * r**2 * np.cos(2.0 * p),
    6: lambda r, p: SQRT8 * r**3 * np.sin(3.0 * p),
    7: lambda r, p: SQRT8 * (3.0 * r**3 - 2.0 * r) * np.sin(p),
    8: lambda r, p: SQRT8 * (3.0 * r**3 - 2.0 * r) * np.cos(p),
    9: lambda r, p: SQRT8 * r**3 * np.cos(3.0 * p),
}


def check_index(index: int) -> int:
    """Validate an ANSI index against the implemented closed forms."""
    if not 0 <= int(index) <= settings.MAX_ZERNIKE_INDEX:
        raise UnsupportedOrderError(
            f"Zernike index {index} is outside 0..{settings.MAX_ZERNIKE_INDEX}"
        )
    return int(index)


def _check_disk(x: Array, y: Array) -> None:
    if np.any(x * x + y * y > 1.0 + DISK_TOLERANCE):
        raise DiskDomainError("Evaluation point lies outside the unit disk")


def zernike_values(index: int, x: Array, y: Array) -> Array:
    """Vectorized Z_index at normalized Cartesian points."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_disk(x, y)
    return _VALUES[check_index(index)](x, y)


def zernike_gradients(index: int, x: Array, y: Array) -> Pair:
    """Vectorized (dZ/dx, dZ/dy) at normalized Cartesian points."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_disk(x, y)
    return _GRADIENTS[check_index(index)](x, y)


def evaluate(index: int, point: DiskPoint) -> float:
    """
    Evaluate Z_index at a disk point.

    Args:
        index: ANSI linear index
        point: Point in the unit disk

    Returns:
        Z_index(x, y)

    Raises:
        UnsupportedOrderError: If index is outside the implemented range
    """
    return float(_VALUES[check_index(index)](np.float64(point.x), np.float64(point.y)))


def evaluate_gradient(index: int, point: DiskPoint) -> Tuple[float, float]:
    """Analytic gradient of Z_index with respect to normalized coordinates."""
    gx, gy = _GRADIENTS[check_index(index)](np.float64(point.x), np.float64(point.y))
    return float(gx), float(gy)


def evaluate_polar(index: int, rho: Array, phi: Array) -> Array:
    """Polar closed form of Z_index."""
    rho = np.asarray(rho, dtype=float)
    if np.any((rho < 0.0) | (rho > 1.0 + DISK_TOLERANCE)):
        raise DiskDomainError("Radius outside [0, 1]")
    return _POLAR[check_index(index)](rho, np.asarray(phi, dtype=float))


def is_harmonic(index: int) -> bool:
    """True when Z_index satisfies the Laplace equation."""
    return check_index(index) in HARMONIC_INDICES


def basis_function(index: int) -> DiskFunction:
    """Z_index as a vectorized disk function."""
    return _VALUES[check_index(index)]


def wavefront_function(c: ZernikeCoefficients) -> DiskFunction:
    """The sum of c_n Z_n as a vectorized disk function (meters)."""
    terms = [(n, c.values[n]) for n in c.nonzero()]

    def func(x: Array, y: Array) -> Array:
        total = np.zeros(np.broadcast(x, y).shape)
        for n, value in terms:
            total = total + value * _VALUES[n](x, y)
        return total

    return func


def wavefront_gradient(c: ZernikeCoefficients, x: Array, y: Array) -> Pair:
    """Gradient of the sum of c_n Z_n with respect to normalized coordinates."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_disk(x, y)
    gx = np.zeros(np.broadcast(x, y).shape)
    gy = np.zeros_like(gx)
    for n in c.nonzero():
        dx, dy = _GRADIENTS[n](x, y)
        gx = gx + c.values[n] * dx
        gy = gy + c.values[n] * dy
    return gx, gy


def inner_product(
    f: DiskFunction,
    g: DiskFunction,
    quadrature: DiskQuadrature | None = None,
    tolerance: float = settings.QUADRATURE_TOLERANCE,
) -> float:
    """
    Disk inner product of two functions, measure rho drho dphi.

    Args:
        f: Vectorized disk function
        g: Vectorized disk function
        quadrature: Quadrature rule, default settings rule
        tolerance: Convergence tolerance against the half-resolution rule

    Returns:
        Integral of f * g over the unit disk

    Raises:
        AccuracyError: If the quadrature does not converge
    """
    return integrate_checked(lambda x, y: f(x, y) * g(x, y), quadrature, tolerance)


def project(
    func: DiskFunction,
    max_index: int,
    quadrature: DiskQuadrature | None = None,
) -> ZernikeCoefficients:
    """Coefficients c_n = <func, Z_n> / pi of an analytic disk function."""
    check_index(max_index)
    values = [
        inner_product(func, basis_function(n), quadrature) / np.pi
        for n in range(max_index + 1)
    ]
    return ZernikeCoefficients(values=values)


def _design(max_index: int, x: Array, y: Array) -> Array:
    return np.column_stack([_VALUES[n](x, y) for n in range(max_index + 1)])


def decompose(
    w: WavefrontMap,
    max_index: int,
    min_samples: int = settings.MIN_DECOMPOSE_SAMPLES,
) -> Tuple[ZernikeCoefficients, float]:
    """
    Decompose a sampled wavefront map into Zernike coefficients.

    The projection runs over valid samples only, as a least-squares fit onto
    the sampled basis, which is the discrete form of <W, Z_n> / pi.

    Args:
        w: Sampled wavefront map
        max_index: Highest ANSI index to fit
        min_samples: Minimum samples across the aperture

    Returns:
        Tuple of (coefficients, residual RMS in meters)

    Raises:
        UnsupportedOrderError: If max_index is outside the implemented range
        ResolutionError: If the map is too coarse
    """
    check_index(max_index)
    across = min(w.shape)
    if across < min_samples:
        raise ResolutionError(
            f"Map has {across} samples across the aperture, "
            f"at least {min_samples} are required"
        )

    x, y = w.mesh()
    mask = w.mask
    xs, ys, values = x[mask], y[mask], w.values[mask]
    if np.any(xs * xs + ys * ys > 1.0 + DISK_TOLERANCE):
        raise DiskDomainError("Valid map samples lie outside the unit disk")

    design = _design(max_index, xs, ys)
    solution, _, rank, _ = np.linalg.lstsq(design, values, rcond=None)
    if rank < design.shape[1]:
        raise ResolutionError(
            f"Valid samples do not resolve indices up to {max_index} (rank {rank})"
        )
    residual = values - design @ solution
    residual_rms = float(np.sqrt(np.mean(residual**2)))
    logger.debug(
        f"Decomposed {values.size} samples up to Z{max_index}, "
        f"residual RMS {residual_rms:.3e} m"
    )
    return ZernikeCoefficients(values=solution), residual_rms


def synthesize(c: ZernikeCoefficients, grid: DiskGrid) -> WavefrontMap:
    """Sample the sum of c_n Z_n on a disk grid."""
    return WavefrontMap.from_function(wavefront_function(c), grid)
