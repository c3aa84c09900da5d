"""Sub-aperture measurement and piston/tilt stitching."""
from dataclasses import dataclass
from itertools import combinations
from typing import List, Tuple

import numpy as np
from loguru import logger
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from windscreen_optics.config import settings
from windscreen_optics.domain.entities.wavefront import (
    GradientField,
    StitchResult,
    SubAperture,
    WavefrontMap,
)
from windscreen_optics.domain.entities.zernike import DiskGrid, ZernikeCoefficients
from windscreen_optics.domain.exceptions import InputError, StitchingError
from windscreen_optics.services.wavefront import (
    add_displacement_noise,
    reconstruct,
    sh_forward,
)
from windscreen_optics.services.zernike import wavefront_function

Window = Tuple[int, int, int, int]


@dataclass(frozen=True)
class _Overlap:
    """Shared valid samples of two tiles in global coordinates."""

    first: int
    second: int
    x: np.ndarray
    y: np.ndarray
    a: np.ndarray
    b: np.ndarray


def _shift(span: slice, origin: int) -> slice:
    return slice(span.start - origin, span.stop - origin)


def _global_axis(
    tiles: List[SubAperture], attr: str, origin: int, size: int
) -> np.ndarray:
    axis = np.full(size, np.nan)
    for tile in tiles:
        span = _shift(tile.rows if attr == "y" else tile.cols, origin)
        values = getattr(tile.map, attr)
        current = axis[span]
        known = np.isfinite(current)
        if np.any(known) and not np.allclose(current[known], values[known]):
            raise StitchingError("Tiles disagree on global coordinates")
        axis[span] = values
    if not np.all(np.isfinite(axis)):
        raise StitchingError(f"Tiles leave gaps along the {attr} axis")
    return axis


def _local_block(tile: SubAperture, rows: slice, cols: slice):
    r = slice(rows.start - tile.offset[0], rows.stop - tile.offset[0])
    c = slice(cols.start - tile.offset[1], cols.stop - tile.offset[1])
    x, y = np.meshgrid(tile.map.x[c], tile.map.y[r])
    return tile.map.values[r, c], x, y


def _find_overlaps(tiles: List[SubAperture], min_overlap: int) -> List[_Overlap]:
    overlaps = []
    for i, j in combinations(range(len(tiles)), 2):
        ti, tj = tiles[i], tiles[j]
        rows = slice(max(ti.rows.start, tj.rows.start), min(ti.rows.stop, tj.rows.stop))
        cols = slice(max(ti.cols.start, tj.cols.start), min(ti.cols.stop, tj.cols.stop))
        if rows.start >= rows.stop or cols.start >= cols.stop:
            continue
        a, x, y = _local_block(ti, rows, cols)
        b, _, _ = _local_block(tj, rows, cols)
        mask = np.isfinite(a) & np.isfinite(b)
        if np.count_nonzero(mask) < min_overlap:
            continue
        xs, ys = x[mask], y[mask]
        spread = np.column_stack([xs - xs.mean(), ys - ys.mean()])
        if np.linalg.matrix_rank(spread) < 2:
            continue
        overlaps.append(_Overlap(i, j, xs, ys, a[mask], b[mask]))
    return overlaps


def stitch(
    tiles: List[SubAperture],
    min_overlap: int = settings.STITCH_MIN_OVERLAP,
) -> StitchResult:
    """
    Join sub-aperture maps by solving per-tile piston and tilt.

    The first tile is the reference. Every other tile receives a correction
    p + tx * x + ty * y chosen by least squares so that overlapping samples
    agree. The global map averages the corrected tiles over the bounding
    box of the tile offsets.

    Args:
        tiles: Sub-aperture maps sharing the global normalized frame
        min_overlap: Minimum shared valid samples for two tiles to connect

    Returns:
        Stitched map with RMS and maximum overlap residual

    Raises:
        StitchingError: If the tile overlap graph is disconnected or the
            tiles leave coordinate gaps
    """
    if not tiles:
        raise InputError("No sub-apertures to stitch")
    radii = {tile.map.aperture_radius for tile in tiles}
    if len(radii) != 1:
        raise StitchingError("Tiles use different aperture radii")
    if any(o < 0 for tile in tiles for o in tile.offset):
        raise StitchingError("Tile offsets must be non-negative")

    count = len(tiles)
    row0 = min(tile.rows.start for tile in tiles)
    col0 = min(tile.cols.start for tile in tiles)
    rows = max(tile.rows.stop for tile in tiles) - row0
    cols = max(tile.cols.stop for tile in tiles) - col0
    overlaps = _find_overlaps(tiles, min_overlap)

    adjacency = np.zeros((count, count))
    for overlap in overlaps:
        adjacency[overlap.first, overlap.second] = 1.0
    components, labels = connected_components(csr_matrix(adjacency), directed=False)
    if components > 1:
        isolated = [int(i) for i in np.flatnonzero(labels != labels[0])]
        raise StitchingError(
            f"Tile overlap graph has {components} components; "
            f"tiles {isolated} are not connected to tile 0",
            details={"disconnected_tiles": isolated},
        )

    corrections = np.zeros((count, 3))
    if count > 1:
        equations, rhs = [], []
        for overlap in overlaps:
            block = np.zeros((overlap.x.size, 3 * (count - 1)))
            basis = np.column_stack([np.ones_like(overlap.x), overlap.x, overlap.y])
            if overlap.first > 0:
                k = 3 * (overlap.first - 1)
                block[:, k : k + 3] += basis
            if overlap.second > 0:
                k = 3 * (overlap.second - 1)
                block[:, k : k + 3] -= basis
            equations.append(block)
            rhs.append(overlap.b - overlap.a)
        solution, _, _, _ = np.linalg.lstsq(
            np.vstack(equations), np.concatenate(rhs), rcond=None
        )
        corrections[1:] = solution.reshape(count - 1, 3)

    total = np.zeros((rows, cols))
    hits = np.zeros((rows, cols))
    for tile, (p, tx, ty) in zip(tiles, corrections):
        x, y = tile.map.mesh()
        corrected = tile.map.values + p + tx * x + ty * y
        valid = np.isfinite(corrected)
        block = (_shift(tile.rows, row0), _shift(tile.cols, col0))
        total[block] += np.where(valid, corrected, 0.0)
        hits[block] += valid

    residuals = []
    for overlap in overlaps:
        pa, txa, tya = corrections[overlap.first]
        pb, txb, tyb = corrections[overlap.second]
        a = overlap.a + pa + txa * overlap.x + tya * overlap.y
        b = overlap.b + pb + txb * overlap.x + tyb * overlap.y
        residuals.append(a - b)
    residual = np.concatenate(residuals) if residuals else np.zeros(1)
    residual_rms = float(np.sqrt(np.mean(residual**2)))
    residual_max = float(np.max(np.abs(residual)))
    if residual_max > 0.0:
        logger.debug(
            f"Stitched {count} tiles, overlap residual RMS {residual_rms:.3e} m, "
            f"max {residual_max:.3e} m"
        )

    with np.errstate(invalid="ignore", divide="ignore"):
        values = np.where(hits > 0, total / np.maximum(hits, 1), np.nan)
    stitched = WavefrontMap(
        values=values,
        x=_global_axis(tiles, "x", col0, cols),
        y=_global_axis(tiles, "y", row0, rows),
        aperture_radius=radii.pop(),
    )
    return StitchResult(
        map=stitched,
        residual_rms=residual_rms,
        residual_max=residual_max,
        corrections=[tuple(float(v) for v in row) for row in corrections],
    )


def grid_windows(
    grid_size: int, tile_shape: Tuple[int, int], counts: Tuple[int, int]
) -> List[Window]:
    """Evenly spread (row0, col0, rows, cols) windows covering a square grid."""
    tile_rows, tile_cols = tile_shape
    if tile_rows > grid_size or tile_cols > grid_size:
        raise InputError("Tile larger than the grid")
    row_starts = np.round(np.linspace(0, grid_size - tile_rows, counts[0])).astype(int)
    col_starts = np.round(np.linspace(0, grid_size - tile_cols, counts[1])).astype(int)
    return [
        (int(r), int(c), tile_rows, tile_cols) for r in row_starts for c in col_starts
    ]


def measure_subapertures(
    c: ZernikeCoefficients,
    grid: DiskGrid,
    windows: List[Window],
    lenslet_step: int = 2,
    lenslet_focal_length: float = settings.DEFAULT_LENSLET_FOCAL_LENGTH_M,
    noise_sigma: float = settings.DEFAULT_DISPLACEMENT_NOISE_M,
    seed: int = 0,
    max_index: int = 5,
) -> List[SubAperture]:
    """
    Simulate Shack-Hartmann sub-aperture measurements of a global wavefront.

    Each window gets lenslets on every ``lenslet_step``-th grid node inside
    the aperture. Its slopes are reconstructed in the window's own disk
    (circumscribing the window) with tilt observable, and the fit is
    re-sampled on the window's global grid nodes.

    Args:
        c: Global wavefront coefficients in meters
        grid: Global disk grid
        windows: (row0, col0, rows, cols) sub-aperture windows on the grid
        lenslet_step: Lenslet pitch in grid nodes
        lenslet_focal_length: f_sh in meters
        noise_sigma: Displacement noise in meters
        seed: Base seed for the noise
        max_index: Highest index of the per-window fit

    Returns:
        Sub-aperture tiles ready for ``stitch``
    """
    coords = grid.coordinates
    global_mask = grid.mask()
    tiles = []
    for k, (row0, col0, n_rows, n_cols) in enumerate(windows):
        xs = coords[col0 : col0 + n_cols]
        ys = coords[row0 : row0 + n_rows]
        centre = np.array([0.5 * (xs[0] + xs[-1]), 0.5 * (ys[0] + ys[-1])])
        radius = 0.5 * np.hypot(xs[-1] - xs[0], ys[-1] - ys[0])
        inside = global_mask[row0 : row0 + n_rows, col0 : col0 + n_cols]

        xx, yy = np.meshgrid(xs, ys)
        picks = np.zeros_like(inside)
        picks[::lenslet_step, ::lenslet_step] = True
        picks &= inside
        lenslets = np.column_stack([xx[picks], yy[picks]])

        measured = sh_forward(c, lenslets, lenslet_focal_length, grid.aperture_radius)
        if noise_sigma > 0.0:
            measured = add_displacement_noise(measured, noise_sigma, seed + k)
        local = GradientField(
            positions=(lenslets - centre) / radius,
            displacements=measured.displacements,
            lenslet_focal_length=lenslet_focal_length,
            aperture_radius=radius * grid.aperture_radius,
        )
        fit = reconstruct(local, max_index=max_index, first_index=1)

        u = (xx - centre[0]) / radius
        v = (yy - centre[1]) / radius
        values = np.full(inside.shape, np.nan)
        values[inside] = wavefront_function(fit.coefficients)(u[inside], v[inside])
        tiles.append(
            SubAperture(
                map=WavefrontMap(
                    values=values, x=xs, y=ys, aperture_radius=grid.aperture_radius
                ),
                offset=(row0, col0),
            )
        )
        logger.debug(
            f"Sub-aperture {k}: {lenslets.shape[0]} lenslets, "
            f"fit residual {fit.residual_norm:.3e}"
        )
    return tiles
