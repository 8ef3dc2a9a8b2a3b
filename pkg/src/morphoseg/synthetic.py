"""Synthetic images with known partitions, used by the demo command and the tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

__all__ = ["SyntheticImage", "two_basin", "four_quadrant", "checkerboard", "planted_color", "corpus"]


@dataclass(frozen=True)
class SyntheticImage:
    name: str
    kind: str  # "gradient", "gray" or "color"
    image: np.ndarray
    ground_truth: np.ndarray


def _noise(rng, shape, amplitude):
    if amplitude <= 0:
        return np.zeros(shape)
    return amplitude * rng.random(shape)


def two_basin(size: int = 32, noise: float = 0.02, seed: int = 0) -> SyntheticImage:
    """Gradient with two Gaussian bowls separated by a horizontal ridge.

    The ridge crest lies between rows ``size // 2 - 1`` and ``size // 2``;
    uniform noise of the given amplitude adds spurious minima.
    """
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    sigma = size / 4.0
    cx = (size - 1) / 2.0
    top = np.exp(-((yy - size / 4.0) ** 2 + (xx - cx) ** 2) / (2 * sigma**2))
    bottom = np.exp(-((yy - 3 * size / 4.0) ** 2 + (xx - cx) ** 2) / (2 * sigma**2))
    ridge = np.exp(-((yy - (size - 1) / 2.0) ** 2) / (2 * 1.5**2))
    g = np.maximum(0.9 * ridge, 0.3 * (1.0 - np.maximum(top, bottom)))
    g = np.clip(g + _noise(rng, g.shape, noise), 0.0, 1.0)
    gt = np.where(yy < size / 2.0, 1, 2).astype(np.int64)
    return SyntheticImage("two_basin", "gradient", g, gt)


def _finish(img, rng, noise, blur):
    if blur > 0:
        img = gaussian_filter(img, sigma=(blur, blur) + (0,) * (img.ndim - 2), mode="nearest")
    return np.clip(img + _noise(rng, img.shape, noise) - noise / 2, 0.0, 1.0)


def four_quadrant(size: int = 64, noise: float = 0.0, blur: float = 1.0, seed: int = 0) -> SyntheticImage:
    """Gray image of four flat quadrants at distinct levels."""
    rng = np.random.default_rng(seed)
    half = size // 2
    levels = np.array([[0.15, 0.45], [0.7, 0.95]])
    gt = np.empty((size, size), dtype=np.int64)
    img = np.empty((size, size))
    for i in range(2):
        for j in range(2):
            sl = (slice(i * half, (i + 1) * half if i == 0 else size), slice(j * half, (j + 1) * half if j == 0 else size))
            img[sl] = levels[i, j]
            gt[sl] = 2 * i + j + 1
    img = _finish(img, rng, noise, blur)
    return SyntheticImage("four_quadrant", "gray", img, gt)


def checkerboard(size: int = 64, tiles: int = 4, noise: float = 0.01, blur: float = 1.0, seed: int = 0) -> SyntheticImage:
    """Two-level checkerboard; every tile is its own ground-truth region."""
    rng = np.random.default_rng(seed)
    step = size // tiles
    yy, xx = np.mgrid[0:size, 0:size]
    ty = np.minimum(yy // step, tiles - 1)
    tx = np.minimum(xx // step, tiles - 1)
    img = np.where((ty + tx) % 2 == 0, 0.25, 0.75)
    img = _finish(img, rng, noise, blur)
    gt = (ty * tiles + tx + 1).astype(np.int64)
    return SyntheticImage("checkerboard", "gray", img, gt)


PLANTED_COLORS = np.array([[0.85, 0.15, 0.15], [0.15, 0.65, 0.2], [0.2, 0.25, 0.85]])


def planted_color(block: int = 24, noise: float = 0.01, blur: float = 1.0, seed: int = 0) -> SyntheticImage:
    """Color image of 2x3 flat blocks using three colors twice each.

    The ground truth groups blocks by color (three labels).
    """
    rng = np.random.default_rng(seed)
    layout = np.array([[0, 1, 2], [1, 2, 0]])
    img = np.empty((2 * block, 3 * block, 3))
    gt = np.empty((2 * block, 3 * block), dtype=np.int64)
    for i in range(2):
        for j in range(3):
            sl = (slice(i * block, (i + 1) * block), slice(j * block, (j + 1) * block))
            img[sl] = PLANTED_COLORS[layout[i, j]]
            gt[sl] = layout[i, j] + 1
    img = _finish(img, rng, noise, blur)
    return SyntheticImage("planted_color", "color", img, gt)


def corpus(seed: int = 0) -> list[SyntheticImage]:
    """The demo corpus: one image of each kind, default settings."""
    return [two_basin(seed=seed), four_quadrant(seed=seed), checkerboard(seed=seed), planted_color(seed=seed)]
