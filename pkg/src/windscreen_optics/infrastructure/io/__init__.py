"""File formats: CSV tables, JSON models and PGM images."""
from windscreen_optics.infrastructure.io.csv_io import (
    MTF_FLOAT_FORMAT,
    read_gradients_csv,
    read_psd_csv,
    read_raster_csv,
    read_table,
    read_wavefront_csv,
    write_gradients_csv,
    write_power_csv,
    write_power_histogram_csv,
    write_table,
    write_wavefront_csv,
)
from windscreen_optics.infrastructure.io.json_io import (
    read_coefficients,
    read_system,
    write_coefficients,
    write_model,
)
from windscreen_optics.infrastructure.io.pgm import (
    read_image,
    read_pgm,
    to_counts,
    write_pgm,
)

__all__ = [
    "MTF_FLOAT_FORMAT",
    "read_coefficients",
    "read_gradients_csv",
    "read_image",
    "read_pgm",
    "read_psd_csv",
    "read_raster_csv",
    "read_system",
    "read_table",
    "read_wavefront_csv",
    "to_counts",
    "write_coefficients",
    "write_gradients_csv",
    "write_model",
    "write_pgm",
    "write_power_csv",
    "write_power_histogram_csv",
    "write_table",
    "write_wavefront_csv",
]
