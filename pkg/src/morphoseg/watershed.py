"""Seed extraction and marker-driven watershed flooding."""

from __future__ import annotations

import enum

import numpy as np

from . import _kernels
from .amr import AmrParams, amr
from .exceptions import PreconditionError
from .gradient import image_gradient
from .validation import check_connectivity, check_gray, check_labels, check_same_shape

__all__ = ["Connectivity", "regional_minima", "watershed_from_markers", "amr_wt", "segment_gradient"]


class Connectivity(enum.IntEnum):
    FOUR = 4
    EIGHT = 8


def regional_minima(g, connectivity=Connectivity.EIGHT) -> np.ndarray:
    """Label every regional-minimum plateau of ``g``.

    A regional minimum is a maximal connected plateau of equal value whose
    neighbors are all strictly higher. Minima are numbered 1..K in raster
    order of their first pixel; every other pixel is 0.
    """
    g = check_gray(g, "gradient")
    conn = check_connectivity(connectivity)
    labels, _ = _kernels.regional_minima_labels(g, _kernels.offsets_for(conn))
    return labels


def watershed_from_markers(g, seeds, connectivity=Connectivity.EIGHT) -> np.ndarray:
    """Flood ``g`` from labelled seeds into a complete partition.

    Pixels are processed by increasing gradient value with FIFO order among
    equal values; seed pixels enqueue their neighbors in raster order. No
    watershed-line pixels are produced and seed pixels keep their labels.

    Raises
    ------
    PreconditionError
        If ``seeds`` has no positive label.
    """
    g = check_gray(g, "gradient")
    seeds = check_labels(seeds, "seeds")
    check_same_shape(g, seeds, ("gradient", "seeds"))
    if not np.any(seeds > 0):
        raise PreconditionError("empty seed image")
    conn = check_connectivity(connectivity)
    return _kernels.meyer_flood(g, seeds, _kernels.offsets_for(conn))


def segment_gradient(g, connectivity=Connectivity.EIGHT) -> np.ndarray:
    """Watershed of ``g`` seeded by its own regional minima."""
    return watershed_from_markers(g, regional_minima(g, connectivity), connectivity)


def amr_wt(
    image,
    params: AmrParams | None = None,
    connectivity=Connectivity.EIGHT,
    *,
    precomputed_gradient: bool = False,
) -> np.ndarray:
    """AMR-WT: gradient, AMR, regional minima, then watershed.

    ``image`` is a gray or color image whose Sobel gradient is taken, or, with
    ``precomputed_gradient=True``, the gradient itself.
    """
    g = check_gray(image, "gradient") if precomputed_gradient else image_gradient(image)
    psi = amr(g, params).psi
    return segment_gradient(psi, connectivity)
