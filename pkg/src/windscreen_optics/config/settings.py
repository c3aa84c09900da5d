# src/windscreen_optics/config/settings.py
import os

from dotenv import load_dotenv

load_dotenv()

# Disk quadrature
QUADRATURE_RADIAL_NODES = int(os.getenv("QUADRATURE_RADIAL_NODES", "64"))
QUADRATURE_AZIMUTHAL_NODES = int(os.getenv("QUADRATURE_AZIMUTHAL_NODES", "128"))
QUADRATURE_TOLERANCE = float(os.getenv("QUADRATURE_TOLERANCE", "1e-9"))

# Wavefront maps
DEFAULT_GRID_SIZE = int(os.getenv("DEFAULT_GRID_SIZE", "65"))
MIN_DECOMPOSE_SAMPLES = int(os.getenv("MIN_DECOMPOSE_SAMPLES", "64"))
MIN_POWER_SAMPLES = int(os.getenv("MIN_POWER_SAMPLES", "32"))
POWER_HISTOGRAM_BINS = int(os.getenv("POWER_HISTOGRAM_BINS", "50"))
MAX_ZERNIKE_INDEX = 9

# Shack-Hartmann reconstruction
GRAMIAN_CONDITION_LIMIT = float(os.getenv("GRAMIAN_CONDITION_LIMIT", "1e12"))
COLLINEARITY_TOLERANCE = float(os.getenv("COLLINEARITY_TOLERANCE", "1e-9"))
DEFAULT_FIRST_INDEX = int(os.getenv("DEFAULT_FIRST_INDEX", "4"))
DEFAULT_LENSLET_FOCAL_LENGTH_M = float(
    os.getenv("DEFAULT_LENSLET_FOCAL_LENGTH_M", "5e-3")
)
DEFAULT_DISPLACEMENT_NOISE_M = float(os.getenv("DEFAULT_DISPLACEMENT_NOISE_M", "1e-7"))
STITCH_MIN_OVERLAP = int(os.getenv("STITCH_MIN_OVERLAP", "3"))

# MTF
DEFAULT_WAVELENGTH_M = float(os.getenv("DEFAULT_WAVELENGTH_M", "550e-9"))
MTF_METHOD = os.getenv("MTF_METHOD", "quadrature")
MTF_OVERLAP_NODES = int(os.getenv("MTF_OVERLAP_NODES", "128"))
MTF_RASTER_SAMPLES = int(os.getenv("MTF_RASTER_SAMPLES", "512"))
MTF_TOLERANCE = float(os.getenv("MTF_TOLERANCE", "1e-6"))
MTF_FREQUENCY_SAMPLES = int(os.getenv("MTF_FREQUENCY_SAMPLES", "51"))
PSF_PUPIL_SAMPLES = int(os.getenv("PSF_PUPIL_SAMPLES", "256"))
PSF_PADDING = int(os.getenv("PSF_PADDING", "4"))
PSF_MIN_PADDING = 4

# Slanted-edge SFR
SFR_OVERSAMPLING = int(os.getenv("SFR_OVERSAMPLING", "4"))
SFR_MIN_ANGLE_DEG = float(os.getenv("SFR_MIN_ANGLE_DEG", "2.0"))
SFR_MAX_ANGLE_DEG = float(os.getenv("SFR_MAX_ANGLE_DEG", "10.0"))
SFR_MIN_SNR = float(os.getenv("SFR_MIN_SNR", "20.0"))
SFR_EDGE_MARGIN_PX = int(os.getenv("SFR_EDGE_MARGIN_PX", "20"))
SFR_REFERENCE_FREQUENCY = float(os.getenv("SFR_REFERENCE_FREQUENCY", "0.25"))
SFR_WINDOW_HALF_WIDTH_PX = int(os.getenv("SFR_WINDOW_HALF_WIDTH_PX", "32"))
SFR_CENTROID_HALF_WIDTH_PX = int(os.getenv("SFR_CENTROID_HALF_WIDTH_PX", "10"))
SFR_MAX_FREQUENCY = float(os.getenv("SFR_MAX_FREQUENCY", "1.0"))
MIN_EDGE_IMAGE_SIZE = 64
DEFAULT_PIXEL_PITCH_M = float(os.getenv("DEFAULT_PIXEL_PITCH_M", "3e-6"))
EDGE_DARK_LEVEL = float(os.getenv("EDGE_DARK_LEVEL", "0.2"))
EDGE_BRIGHT_LEVEL = float(os.getenv("EDGE_BRIGHT_LEVEL", "0.8"))
EDGE_RENDER_NODES = 24
CHART_ROI_SIZE_PX = int(os.getenv("CHART_ROI_SIZE_PX", "64"))

# Repeated measurements
CONFIDENCE_LEVEL = float(os.getenv("CONFIDENCE_LEVEL", "0.95"))

# Camera and windscreen system
DEFAULT_FOCAL_LENGTH_M = float(os.getenv("DEFAULT_FOCAL_LENGTH_M", "6e-3"))
DEFAULT_F_NUMBER = float(os.getenv("DEFAULT_F_NUMBER", "2.0"))
DEFAULT_INCLINATION_DEG = float(os.getenv("DEFAULT_INCLINATION_DEG", "63.0"))
WINDSCREEN_VALIDITY_LIMIT = float(os.getenv("WINDSCREEN_VALIDITY_LIMIT", "0.1"))
SYSTEM_REFERENCE_FRACTION = float(os.getenv("SYSTEM_REFERENCE_FRACTION", "0.02"))
SEPARABILITY_TOLERANCE = float(os.getenv("SEPARABILITY_TOLERANCE", "0.05"))
SEPARABILITY_BAND = float(os.getenv("SEPARABILITY_BAND", "0.8"))
SEPARABILITY_FLOOR = float(os.getenv("SEPARABILITY_FLOOR", "1e-3"))
SEPARABILITY_DEVIATION_FLOOR = float(
    os.getenv("SEPARABILITY_DEVIATION_FLOOR", "0.05")
)

# Workers
N_JOBS = int(os.getenv("N_JOBS", "1"))
