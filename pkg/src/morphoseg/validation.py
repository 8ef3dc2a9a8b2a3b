"""Input validation helpers.

Images are plain numpy arrays: ``(H, W)`` float64 in ``[0, 1]`` for gray
and gradient images, ``(H, W, 3)`` for color images, ``(H, W)`` integer
arrays for label images. The helpers below coerce and check them, in the
spirit of :func:`sklearn.utils.check_array`.
"""

from __future__ import annotations

import numpy as np

from .exceptions import ParameterError, PreconditionError, ShapeError

__all__ = [
    "check_gray",
    "check_color",
    "check_image",
    "check_labels",
    "check_partition",
    "check_same_shape",
    "check_connectivity",
]


def _check_unit_range(arr: np.ndarray, name: str) -> None:
    if arr.size == 0:
        raise ShapeError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} contains non-finite samples")
    lo, hi = float(arr.min()), float(arr.max())
    if lo < 0.0 or hi > 1.0:
        raise ParameterError(f"{name} samples must lie in [0, 1], got [{lo}, {hi}]")


def check_gray(img, name: str = "image") -> np.ndarray:
    """Return ``img`` as a contiguous float64 ``(H, W)`` array in [0, 1]."""
    arr = np.ascontiguousarray(img, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {arr.shape}")
    _check_unit_range(arr, name)
    return arr


def check_color(img, name: str = "image") -> np.ndarray:
    arr = np.ascontiguousarray(img, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ShapeError(f"{name} must have shape (H, W, 3), got {arr.shape}")
    _check_unit_range(arr, name)
    return arr


def check_image(img, name: str = "image") -> np.ndarray:
    """Accept either a gray ``(H, W)`` or color ``(H, W, 3)`` image."""
    arr = np.asarray(img)
    if arr.ndim == 3:
        return check_color(arr, name)
    return check_gray(arr, name)


def check_labels(labels, name: str = "labels") -> np.ndarray:
    arr = np.asarray(labels)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.size == 0:
        raise ShapeError(f"{name} is empty")
    if arr.dtype.kind not in "iu":
        if not np.all(np.mod(arr, 1) == 0):
            raise ParameterError(f"{name} must hold integers")
    arr = np.ascontiguousarray(arr, dtype=np.int64)
    if arr.min() < 0:
        raise ParameterError(f"{name} must be non-negative")
    return arr


def check_partition(labels, name: str = "labels") -> np.ndarray:
    """Labels forming a complete partition: no pixel carries label 0."""
    arr = check_labels(labels, name)
    if np.any(arr == 0):
        raise PreconditionError(f"{name} is not a complete partition (contains label 0)")
    return arr


def check_same_shape(a: np.ndarray, b: np.ndarray, names=("a", "b")) -> None:
    if a.shape[:2] != b.shape[:2]:
        raise ShapeError(f"shape mismatch: {names[0]} {a.shape[:2]} vs {names[1]} {b.shape[:2]}")


def check_connectivity(conn) -> int:
    try:
        value = int(conn)
    except (TypeError, ValueError):
        raise ParameterError(f"connectivity must be 4 or 8, got {conn!r}") from None
    if value not in (4, 8):
        raise ParameterError(f"connectivity must be 4 or 8, got {conn!r}")
    return value
