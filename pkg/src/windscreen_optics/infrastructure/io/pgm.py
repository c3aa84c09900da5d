# src/windscreen_optics/infrastructure/io/pgm.py
"""Grayscale PGM images (binary P5 and ASCII P2) through Pillow."""
from pathlib import Path
from typing import Tuple

import numpy as np
from PIL import Image

from windscreen_optics.domain.exceptions import InputError, ParseError
from windscreen_optics.infrastructure.io.csv_io import read_raster_csv

MAXVAL_8 = 255
MAXVAL_16 = 65535
# Pillow rescales PGM samples to the full range of these modes
FULL_SCALE = {"L": MAXVAL_8, "I": MAXVAL_16, "I;16": MAXVAL_16, "I;16B": MAXVAL_16}


def read_pgm(path: Path) -> Tuple[np.ndarray, int]:
    """
    Read a P2 or P5 grayscale image.

    Samples come back on Pillow's full scale: 255 for files with a maxval up
    to 255, 65535 above that.

    Args:
        path: PGM file

    Returns:
        Tuple of (integer raster, full-scale value)

    Raises:
        ParseError: If the file is not a valid grayscale PGM image
    """
    name = str(path)
    try:
        with Image.open(path) as image:
            if image.format != "PPM" or image.mode not in FULL_SCALE:
                raise ParseError(
                    f"not a grayscale PGM ({image.format} {image.mode})", path=name
                )
            image.load()
            pixels = np.asarray(image).astype(np.int64)
            scale = FULL_SCALE[image.mode]
    except FileNotFoundError:
        raise InputError(f"File not found: {path}", details={"path": name})
    except (OSError, ValueError, SyntaxError) as e:
        raise ParseError(f"invalid PGM image ({e})", path=name)
    return pixels, scale


def write_pgm(path: Path, pixels: np.ndarray, binary: bool = True) -> None:
    """Write a 16-bit PGM (maxval 65535); Pillow writes P5, P2 is plain text."""
    pixels = np.asarray(pixels)
    if pixels.ndim != 2:
        raise InputError(f"PGM raster must be 2-D, got shape {pixels.shape}")
    if np.any(pixels < 0) or np.any(pixels > MAXVAL_16):
        raise InputError("PGM pixel values must lie in 0..65535")
    if binary:
        Image.fromarray(pixels.astype(np.int32)).save(path, format="PPM")
        return
    height, width = pixels.shape
    header = f"P2\n{width} {height}\n{MAXVAL_16}\n"
    body = "\n".join(" ".join(str(int(v)) for v in row) for row in pixels)
    Path(path).write_text(header + body + "\n", encoding="ascii")


def to_counts(values: np.ndarray) -> np.ndarray:
    """Full-scale [0, 1] intensities to 16-bit counts."""
    return np.round(np.clip(values, 0.0, 1.0) * MAXVAL_16).astype(np.int64)


def read_image(path: Path) -> np.ndarray:
    """
    Read a PGM or headerless CSV raster as full-scale [0, 1] intensities.

    Args:
        path: Image file; ``.csv`` files are read as rasters

    Returns:
        Float raster
    """
    if Path(path).suffix.lower() == ".csv":
        return read_raster_csv(path)
    pixels, scale = read_pgm(path)
    return pixels / float(scale)
