"""Common fixtures for testing."""
import json
import sys

import pytest
from click.testing import CliRunner
from loguru import logger

from windscreen_optics.domain.entities.mtf import PupilSpec
from windscreen_optics.domain.entities.system import LensModel
from windscreen_optics.domain.entities.zernike import DiskGrid, ZernikeCoefficients

WAVELENGTH = 550e-9


@pytest.fixture
def lens() -> LensModel:
    """Default camera lens, f = 6 mm at f/2, no field curvature."""
    return LensModel(focal_length=6e-3, f_number=2.0)


@pytest.fixture
def pupil(lens) -> PupilSpec:
    return lens.pupil


@pytest.fixture
def grid() -> DiskGrid:
    """65 x 65 grid over a 10 mm aperture radius."""
    return DiskGrid(size=65, aperture_radius=0.01)


@pytest.fixture
def fine_grid() -> DiskGrid:
    return DiskGrid(size=129, aperture_radius=0.01)


@pytest.fixture
def aberrated() -> ZernikeCoefficients:
    """Mixed second and third order wavefront in meters."""
    return ZernikeCoefficients.from_mapping(
        {4: 0.5e-6, 5: -0.2e-6, 3: 0.15e-6, 7: 0.1e-6, 9: 0.05e-6}, max_index=9
    )


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture
def write_json(tmp_path):
    """Write a JSON document into the test directory and return its path."""

    def _write(name: str, payload) -> str:
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return str(path)

    return _write


@pytest.fixture(autouse=True)
def quiet_logging():
    """Send loguru warnings to the stderr of the running test only."""
    logger.remove()
    logger.add(sys.stderr, level="WARNING")
    yield
    logger.remove()
