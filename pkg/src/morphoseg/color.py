"""Color conversion: sRGB to CIELAB and to luminance."""

from __future__ import annotations

import numpy as np

from .validation import check_color

__all__ = ["rgb_to_lab", "to_gray", "BT601_WEIGHTS"]

BT601_WEIGHTS = np.array([0.299, 0.587, 0.114])

# linear sRGB -> XYZ, D65
_SRGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
# reference white is the XYZ image of linear (1, 1, 1), so neutral grays map to a = b = 0
_WHITE = _SRGB_TO_XYZ.sum(axis=1)
_EPS = (6.0 / 29.0) ** 3


def _srgb_to_linear(c: np.ndarray) -> np.ndarray:
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


def _lab_f(t: np.ndarray) -> np.ndarray:
    return np.where(t > _EPS, np.cbrt(t), t / (3.0 * (6.0 / 29.0) ** 2) + 4.0 / 29.0)


def rgb_to_lab(img) -> np.ndarray:
    """Convert an ``(H, W, 3)`` sRGB image in [0, 1] to CIELAB.

    Returns an ``(H, W, 3)`` array of (L, a, b) with L in [0, 100].
    """
    rgb = check_color(img)
    xyz = _srgb_to_linear(rgb) @ _SRGB_TO_XYZ.T
    fx, fy, fz = (_lab_f(xyz[..., i] / _WHITE[i]) for i in range(3))
    lab = np.empty_like(xyz)
    lab[..., 0] = 116.0 * fy - 16.0
    lab[..., 1] = 500.0 * (fx - fy)
    lab[..., 2] = 200.0 * (fy - fz)
    return lab


def to_gray(img) -> np.ndarray:
    """ITU-R BT.601 luminance, clamped to [0, 1]."""
    rgb = check_color(img)
    return np.clip(rgb @ BT601_WEIGHTS, 0.0, 1.0)
