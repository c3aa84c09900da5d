"""Error hierarchy for windscreen optics.

Every error carries the process exit code the CLI reports for it:
2 for input and parse problems, 3 for numerical or degenerate problems,
4 for measurement validity problems.
"""
from typing import Any, Dict, Optional


class WindscreenOpticsError(Exception):
    """Base error for all windscreen optics failures."""

    exit_code: int = 1
    error_type: str = "error"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}


class InputError(WindscreenOpticsError):
    """Invalid input values or files."""

    exit_code = 2
    error_type = "input_error"


class ParseError(InputError):
    """Malformed input file."""

    error_type = "parse_error"

    def __init__(self, message: str, path: str = "", line: Optional[int] = None):
        location = f"{path}:{line}" if line is not None else path
        super().__init__(
            f"{location}: {message}" if location else message,
            details={"path": path, "line": line},
        )
        self.path = path
        self.line = line


class UnsupportedOrderError(InputError):
    """Zernike index beyond the implemented closed forms."""

    error_type = "unsupported_order"


class DiskDomainError(InputError):
    """Point outside the closed unit disk."""

    error_type = "disk_domain"


class ResolutionError(InputError):
    """Map sampled too coarsely for the requested operation."""

    error_type = "resolution"


class GeometryError(InputError):
    """Inconsistent image or kernel geometry."""

    error_type = "geometry"


class FieldDomainError(InputError):
    """Field angle outside the modelled camera cutout."""

    error_type = "field_domain"


class NumericalError(WindscreenOpticsError):
    """Numerical failure or degenerate configuration."""

    exit_code = 3
    error_type = "numerical_error"


class AccuracyError(NumericalError):
    """Integration did not reach the requested tolerance."""

    error_type = "accuracy"

    def __init__(self, message: str, residual: float):
        super().__init__(message, details={"residual": residual})
        self.residual = residual


class NonPhysicalGradientError(NumericalError):
    """Wavefront slope with |beta| >= 1."""

    error_type = "nonphysical_gradient"


class DegenerateLayoutError(NumericalError):
    """Lenslet layout leaves coefficient directions unconstrained."""

    error_type = "degenerate_layout"

    def __init__(self, message: str, directions: list):
        super().__init__(message, details={"deficient_directions": directions})
        self.directions = directions


class InvalidPointError(NumericalError):
    """Evaluation point without a full finite-difference stencil."""

    error_type = "invalid_point"


class StitchingError(NumericalError):
    """Sub-aperture tiles cannot be joined into one map."""

    error_type = "stitching"


class AliasingError(NumericalError):
    """PSF grid too small for the pupil it samples."""

    error_type = "aliasing"


class ApproximationValidityError(NumericalError):
    """First-order approximation used outside its range."""

    error_type = "approximation_validity"


class MeasurementValidityError(WindscreenOpticsError):
    """Slanted-edge measurement preconditions are violated."""

    exit_code = 4
    error_type = "measurement_validity"
