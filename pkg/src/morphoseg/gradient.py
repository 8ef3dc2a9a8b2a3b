"""Gradient images consumed by AMR: Sobel magnitude or external maps."""

from __future__ import annotations

import numpy as np

from .color import to_gray
from .exceptions import FormatError
from .io import _read_bytes, _decode_pfm, _decode_pnm
from .validation import check_gray, check_image

__all__ = ["sobel_gradient", "load_gradient", "image_gradient"]

def sobel_gradient(img) -> np.ndarray:
    """Sobel gradient magnitude, normalized so that the maximum is 1.

    Border pixels are replicated. A flat image yields all zeros.
    """
    gray = check_gray(img)
    p = np.pad(gray, 1, mode="edge")
    # each component is a difference of two identically weighted sums, so a
    # flat neighborhood gives exactly zero instead of round-off noise
    cols = p[:-2] + 2.0 * p[1:-1] + p[2:]
    rows = p[:, :-2] + 2.0 * p[:, 1:-1] + p[:, 2:]
    gx = cols[:, 2:] - cols[:, :-2]
    gy = rows[2:] - rows[:-2]
    mag = np.hypot(gx, gy)
    peak = mag.max()
    if peak <= 0.0:
        return np.zeros_like(gray)
    return np.clip(mag / peak, 0.0, 1.0)


def image_gradient(img) -> np.ndarray:
    """Sobel gradient of a gray or color image (color goes through BT.601 luminance)."""
    arr = check_image(img)
    if arr.ndim == 3:
        arr = to_gray(arr)
    return sobel_gradient(arr)


def load_gradient(path) -> np.ndarray:
    """Read an externally computed gradient / boundary map.

    PFM samples are clamped into [0, 1]; PGM samples are divided by maxval.

    Raises
    ------
    FormatError
        Unsupported container, color data, or non-finite samples.
    """
    data = _read_bytes(path)
    magic = data[:2]
    if magic in (b"Pf", b"PF"):
        arr = _decode_pfm(data)
        if not np.all(np.isfinite(arr)):
            raise FormatError(f"{path}: gradient contains NaN or infinite samples")
        arr = np.clip(arr, 0.0, 1.0)
    elif magic == b"P5":
        arr = _decode_pnm(data)
    else:
        raise FormatError(f"{path}: gradient must be PFM or PGM, magic bytes {data[:4]!r}")
    if arr.ndim != 2:
        raise FormatError(f"{path}: gradient must be single-channel")
    return np.ascontiguousarray(arr)
