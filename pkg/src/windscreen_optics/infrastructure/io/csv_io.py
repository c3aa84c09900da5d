# src/windscreen_optics/infrastructure/io/csv_io.py
"""CSV tables with ``#key=value`` metadata lines."""
import io
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from loguru import logger

from windscreen_optics.domain.entities.mtf import SpectralDensity
from windscreen_optics.domain.entities.wavefront import (
    GradientField,
    PowerStatistics,
    RefractivePowerMap,
    WavefrontMap,
)
from windscreen_optics.domain.exceptions import InputError, ParseError

MTF_FLOAT_FORMAT = "%.6f"
MAP_FLOAT_FORMAT = "%.10g"
GRID_TOLERANCE = 1e-6
GRADIENT_COLUMNS = ["x_norm", "y_norm", "dx_m", "dy_m"]


def _read_lines(path: Path) -> List[str]:
    try:
        return Path(path).read_text(encoding="utf-8").splitlines()
    except FileNotFoundError:
        raise InputError(f"File not found: {path}", details={"path": str(path)})
    except UnicodeDecodeError as e:
        raise ParseError(f"not a text file ({e.reason})", path=str(path))


def read_table(
    path: Path, required: Sequence[str]
) -> Tuple[pd.DataFrame, Dict[str, str], List[int]]:
    """
    Read a numeric CSV table preceded by optional ``# key=value`` lines.

    Args:
        path: CSV file
        required: Columns that must be present

    Returns:
        Tuple of (numeric frame, metadata, file line number of each row)

    Raises:
        ParseError: On a missing header, wrong field count or non-numeric cell
    """
    metadata: Dict[str, str] = {}
    header: Optional[Tuple[int, str]] = None
    rows: List[Tuple[int, str]] = []
    for number, line in enumerate(_read_lines(path), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            key, sep, value = stripped[1:].partition("=")
            if sep:
                metadata[key.strip()] = value.strip()
            continue
        if header is None:
            header = (number, stripped)
        else:
            rows.append((number, stripped))

    if header is None:
        raise ParseError("file has no header line", path=str(path))
    columns = [name.strip() for name in header[1].split(",")]
    missing = [name for name in required if name not in columns]
    if missing:
        raise ParseError(
            f"missing columns {missing}, found {columns}", path=str(path), line=header[0]
        )
    if not rows:
        raise ParseError("file has no data rows", path=str(path))
    for number, line in rows:
        fields = line.count(",") + 1
        if fields != len(columns):
            raise ParseError(
                f"expected {len(columns)} fields, found {fields}",
                path=str(path),
                line=number,
            )

    text = "\n".join([header[1]] + [line for _, line in rows])
    raw = pd.read_csv(io.StringIO(text), dtype=str, skipinitialspace=True)
    raw.columns = columns
    frame = pd.DataFrame(index=raw.index)
    for name in columns:
        cells = raw[name].fillna("nan").str.strip()
        numeric = pd.to_numeric(cells, errors="coerce")
        bad = numeric.isna() & ~cells.str.lower().isin(["nan", ""])
        if bad.any():
            position = int(np.flatnonzero(bad.to_numpy())[0])
            raise ParseError(
                f"non-numeric value {cells.iloc[position]!r} in column {name!r}",
                path=str(path),
                line=rows[position][0],
            )
        frame[name] = numeric.astype(float)
    return frame, metadata, [number for number, _ in rows]


def write_table(
    path: Path,
    frame: pd.DataFrame,
    metadata: Optional[Dict[str, object]] = None,
    float_format: str = MAP_FLOAT_FORMAT,
) -> None:
    """Write ``# key=value`` metadata lines followed by the CSV table."""
    lines = [f"# {key}={value}" for key, value in (metadata or {}).items()]
    body = frame.to_csv(
        index=False, float_format=float_format, na_rep="nan", lineterminator="\n"
    )
    Path(path).write_text("".join(line + "\n" for line in lines) + body, encoding="utf-8")
    logger.debug(f"Wrote {len(frame)} rows to {path}")


def _metadata_float(
    metadata: Dict[str, str], key: str, override: Optional[float], path: Path
) -> float:
    if override is not None:
        return override
    if key not in metadata:
        raise InputError(
            f"{path}: missing #{key} metadata and no command line value",
            details={"path": str(path), "key": key},
        )
    try:
        return float(metadata[key])
    except ValueError:
        raise ParseError(f"metadata {key} is not a number", path=str(path))


def _uniform_step(axis: np.ndarray, name: str, path: Path) -> float:
    steps = np.diff(axis)
    step = float(np.mean(steps))
    if not np.allclose(steps, step, rtol=GRID_TOLERANCE, atol=0.0):
        raise InputError(
            f"{path}: {name} coordinates are not uniformly spaced",
            details={"path": str(path), "axis": name},
        )
    return step


def _grid_axes(frame: pd.DataFrame, path: Path) -> Tuple[np.ndarray, np.ndarray]:
    x = np.unique(frame["x"].to_numpy())
    y = np.unique(frame["y"].to_numpy())
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ParseError("coordinates must be finite", path=str(path))
    if x.size < 2 or y.size < 2:
        raise ParseError("coordinates do not span a 2-D grid", path=str(path))
    dx = _uniform_step(x, "x", path)
    dy = _uniform_step(y, "y", path)
    if not np.isclose(dx, dy, rtol=GRID_TOLERANCE, atol=0.0):
        raise InputError(
            f"{path}: x spacing {dx:.6g} differs from y spacing {dy:.6g}",
            details={"path": str(path), "dx": dx, "dy": dy},
        )
    return x, y


def read_wavefront_csv(
    path: Path, aperture_radius: Optional[float] = None
) -> WavefrontMap:
    """
    Read a wavefront map from ``x,y,w_m`` rows.

    Coordinates are normalized disk coordinates on a regular grid; grid nodes
    without a row or with ``nan`` are invalid samples.

    Args:
        path: CSV file
        aperture_radius: Physical aperture radius in meters, overrides the
            ``# aperture_radius_m`` metadata line

    Returns:
        Wavefront map

    Raises:
        ParseError: On a duplicate (x, y) row
        InputError: If the axes are not uniform with equal x and y spacing
    """
    frame, metadata, lines = read_table(path, ["x", "y", "w_m"])
    radius = _metadata_float(metadata, "aperture_radius_m", aperture_radius, path)
    duplicated = frame.duplicated(subset=["x", "y"]).to_numpy()
    if duplicated.any():
        line = lines[int(np.flatnonzero(duplicated)[0])]
        raise ParseError("duplicate (x, y) sample", path=str(path), line=line)
    x, y = _grid_axes(frame, path)
    values = np.full((y.size, x.size), np.nan)
    cols = np.searchsorted(x, frame["x"].to_numpy())
    rows = np.searchsorted(y, frame["y"].to_numpy())
    values[rows, cols] = frame["w_m"].to_numpy()
    return WavefrontMap(values=values, x=x, y=y, aperture_radius=radius)


def write_wavefront_csv(path: Path, w: WavefrontMap) -> None:
    x, y = w.mesh()
    frame = pd.DataFrame(
        {"x": x.ravel(), "y": y.ravel(), "w_m": w.values.ravel()}
    )
    write_table(path, frame, {"aperture_radius_m": w.aperture_radius})


def read_gradients_csv(
    path: Path,
    lenslet_focal_length: Optional[float] = None,
    aperture_radius: Optional[float] = None,
) -> GradientField:
    """Read ``x_norm,y_norm,dx_m,dy_m`` lenslet rows into a gradient field."""
    frame, metadata, lines = read_table(path, GRADIENT_COLUMNS)
    data = frame[GRADIENT_COLUMNS].to_numpy()
    invalid = ~np.all(np.isfinite(data), axis=1)
    if invalid.any():
        line = lines[int(np.flatnonzero(invalid)[0])]
        raise ParseError("lenslet rows must be finite", path=str(path), line=line)
    return GradientField(
        positions=data[:, :2],
        displacements=data[:, 2:],
        lenslet_focal_length=_metadata_float(
            metadata, "f_sh_m", lenslet_focal_length, path
        ),
        aperture_radius=_metadata_float(
            metadata, "aperture_radius_m", aperture_radius, path
        ),
    )


def write_gradients_csv(path: Path, g: GradientField) -> None:
    frame = pd.DataFrame(
        {
            "x_norm": g.positions[:, 0],
            "y_norm": g.positions[:, 1],
            "dx_m": g.displacements[:, 0],
            "dy_m": g.displacements[:, 1],
        }
    )
    write_table(
        path,
        frame,
        {"f_sh_m": g.lenslet_focal_length, "aperture_radius_m": g.aperture_radius},
    )


def write_power_csv(path: Path, maps: Sequence[RefractivePowerMap]) -> None:
    """Write ``x,y,Dx_dpt,Dy_dpt,Dxy_dpt`` rows; invalid samples are nan."""
    reference = maps[0]
    x, y = reference.mesh()
    frame = pd.DataFrame({"x": x.ravel(), "y": y.ravel()})
    for power in maps:
        frame[f"D{power.axis.value}_dpt"] = power.values.ravel()
    write_table(path, frame, {"aperture_radius_m": reference.aperture_radius})


def write_power_histogram_csv(path: Path, statistics: Sequence[PowerStatistics]) -> None:
    """
    Write ``axis,bin_low_dpt,bin_high_dpt,count`` rows for each power axis.

    The metadata lines carry the expectation value and the interval of every
    axis, e.g. ``# mean_Dx_dpt=`` and ``# interval_Dx_dpt=low high``.
    """
    frames, metadata = [], {}
    for stats in statistics:
        name = f"D{stats.axis.value}"
        frames.append(
            pd.DataFrame(
                {
                    "axis": stats.axis.value,
                    "bin_low_dpt": stats.bin_edges[:-1],
                    "bin_high_dpt": stats.bin_edges[1:],
                    "count": stats.counts.astype(int),
                }
            )
        )
        low, high = stats.interval
        metadata[f"mean_{name}_dpt"] = f"{stats.mean:.10g}"
        metadata[f"interval_{name}_dpt"] = f"{low:.10g} {high:.10g}"
    metadata["confidence"] = statistics[0].confidence
    write_table(path, pd.concat(frames, ignore_index=True), metadata)


def read_psd_csv(path: Path) -> SpectralDensity:
    """Read ``lambda_m,weight`` rows as normalized spectral lines."""
    frame, _, _ = read_table(path, ["lambda_m", "weight"])
    return SpectralDensity.from_lines(
        frame["lambda_m"].to_numpy(), frame["weight"].to_numpy()
    )


def read_raster_csv(path: Path) -> np.ndarray:
    """Read a headerless numeric CSV raster."""
    try:
        frame = pd.read_csv(path, header=None, comment="#", dtype=float)
    except FileNotFoundError:
        raise InputError(f"File not found: {path}", details={"path": str(path)})
    except (ValueError, pd.errors.ParserError) as e:
        raise ParseError(f"invalid raster ({e})", path=str(path))
    return frame.to_numpy()
