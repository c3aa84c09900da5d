"""Base class for all domain entities."""
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict


class Entity(BaseModel):
    """Base domain entity."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


def frozen_array(value: Any, ndim: int | None = None) -> np.ndarray:
    """Copy ``value`` into a read-only float array.

    Args:
        value: Array-like input
        ndim: Required number of dimensions, if any

    Returns:
        Read-only float64 array

    Raises:
        ValueError: If the dimensionality does not match
    """
    array = np.array(value, dtype=float, copy=True)
    if ndim is not None and array.ndim != ndim:
        raise ValueError(f"Expected a {ndim}-D array, got shape {array.shape}")
    array.flags.writeable = False
    return array
