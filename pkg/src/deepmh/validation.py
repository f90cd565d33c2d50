"""Input-validation helpers shared by the estimator API.

All helpers coerce to float64 ndarrays and raise :class:`ValidationError`
with a message naming the offending argument, so callers can pass user
input straight through.
"""

from __future__ import annotations

import numpy as np

from .exceptions import ValidationError


def as_vector(x, dim: int | None = None, name: str = "x") -> np.ndarray:
    """Coerce ``x`` to a finite 1-D float64 array, optionally of length ``dim``."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be a 1-D vector, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise ValidationError(f"{name} has length {arr.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")
    return arr


def as_matrix(
    x,
    n_cols: int | None = None,
    min_rows: int = 1,
    name: str = "X",
) -> np.ndarray:
    """Coerce ``x`` to a finite 2-D float64 array."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 2:
        raise ValidationError(f"{name} must be a 2-D array, got shape {arr.shape}")
    if n_cols is not None and arr.shape[1] != n_cols:
        raise ValidationError(
            f"{name} has {arr.shape[1]} columns, expected {n_cols}"
        )
    if arr.shape[0] < min_rows:
        raise ValidationError(
            f"{name} has {arr.shape[0]} rows, need at least {min_rows}"
        )
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")
    return arr


def check_positive(value, name: str, strict: bool = True) -> float:
    """Validate a scalar parameter is positive (or nonnegative)."""
    v = float(value)
    if not np.isfinite(v):
        raise ValidationError(f"{name} must be finite, got {value!r}")
    if strict and v <= 0:
        raise ValidationError(f"{name} must be > 0, got {value!r}")
    if not strict and v < 0:
        raise ValidationError(f"{name} must be >= 0, got {value!r}")
    return v


def check_int_at_least(value, minimum: int, name: str) -> int:
    """Validate an integer parameter with a lower bound."""
    v = int(value)
    if v != value:
        raise ValidationError(f"{name} must be an integer, got {value!r}")
    if v < minimum:
        raise ValidationError(f"{name} must be >= {minimum}, got {value!r}")
    return v
