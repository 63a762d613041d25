"""Small input-validation helpers shared across the package."""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch


def check_finite(name: str, value) -> None:
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite, got {value!r}")


def check_positive(name: str, value: float) -> None:
    check_finite(name, value)
    if not value > 0:
        raise ValueError(f"{name} must be > 0, got {value!r}")


def check_range(name: str, value: float, lo: float, hi: float) -> None:
    check_finite(name, value)
    if not (lo <= value <= hi):
        raise ValueError(f"{name} must lie in [{lo}, {hi}], got {value!r}")


def check_int_range(name: str, value: int, lo: int, hi: int) -> None:
    if not isinstance(value, (int, np.integer)):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if not (lo <= value <= hi):
        raise ValueError(f"{name} must lie in [{lo}, {hi}], got {value!r}")


def round_half_up(value: float) -> int:
    """Round to the nearest integer; exact halves round up."""
    return int(np.floor(value + 0.5))


def check_shape(name: str, arr: np.ndarray, shape: tuple) -> np.ndarray:
    arr = np.asarray(arr, dtype=float)
    if arr.ndim != len(shape):
        raise DimensionMismatch(
            f"{name} must have {len(shape)} dimensions, got {arr.ndim}"
        )
    for axis, want in enumerate(shape):
        if want is not None and arr.shape[axis] != want:
            raise DimensionMismatch(
                f"{name} must have shape {shape}, got {arr.shape}"
            )
    return arr
