# src/windscreen_optics/infrastructure/io/json_io.py
"""JSON coefficient and system model files."""
import json
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import BaseModel, ValidationError

from windscreen_optics.domain.entities.zernike import ZernikeCoefficients
from windscreen_optics.domain.exceptions import InputError, ParseError
from windscreen_optics.models.schemas import CoefficientFile, SystemSpec


def _load(path: Path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise InputError(f"File not found: {path}", details={"path": str(path)})
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, path=str(path), line=e.lineno)


def _validation_message(error: ValidationError) -> str:
    first = error.errors()[0]
    location = ".".join(str(part) for part in first["loc"])
    return f"{location}: {first['msg']}" if location else first["msg"]


def read_coefficients(path: Path) -> ZernikeCoefficients:
    """
    Read Zernike coefficients in meters.

    Accepts a JSON array (plain numbers or ``{index, value_m}`` records) or
    an object with a ``coefficients`` key.

    Args:
        path: JSON file

    Returns:
        Coefficient vector

    Raises:
        ParseError: If the document is malformed
    """
    payload = _load(path)
    if isinstance(payload, list):
        payload = {"coefficients": payload}
    try:
        return CoefficientFile.model_validate(payload).to_domain()
    except ValidationError as e:
        raise ParseError(_validation_message(e), path=str(path))
    except ValueError as e:
        raise ParseError(str(e), path=str(path))


def write_coefficients(
    path: Path, c: ZernikeCoefficients, metadata: Optional[Dict[str, Any]] = None
) -> None:
    write_model(path, CoefficientFile.from_domain(c, metadata))


def read_system(path: Path) -> SystemSpec:
    """Read a lens plus windscreen system model."""
    payload = _load(path)
    try:
        return SystemSpec.model_validate(payload)
    except ValidationError as e:
        raise ParseError(_validation_message(e), path=str(path))


def write_model(path: Path, model: BaseModel) -> None:
    Path(path).write_text(model.model_dump_json(indent=2) + "\n", encoding="utf-8")
