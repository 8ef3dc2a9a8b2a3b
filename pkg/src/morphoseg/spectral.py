"""AMR-SC: spectral clustering of an AMR-WT pre-segmentation.

Each pre-segmented region is described by its mean CIELAB color. Regions are
linked by a dense Gaussian affinity, embedded with the symmetric normalized
Laplacian and grouped by k-means.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

import warnings

from . import _kernels
from .amr import AmrParams, amr
from .color import rgb_to_lab
from .exceptions import ParameterError, ShapeError
from .validation import check_color, check_partition, check_same_shape
from .watershed import Connectivity, amr_wt, segment_gradient

__all__ = [
    "RegionFeatures",
    "region_features",
    "affinity",
    "normalized_laplacian",
    "jacobi_eigh",
    "kmeans",
    "spectral_cluster",
    "relabel_sequential",
    "amr_sc",
    "cluster_regions",
    "relabel_pixels",
]


@dataclass(frozen=True)
class RegionFeatures:
    """Per-region mean CIELAB color, in ascending order of region label."""

    labels: np.ndarray
    mean_lab: np.ndarray
    pixel_count: np.ndarray

    @property
    def region_count(self) -> int:
        return int(self.labels.size)


def region_features(img, seg) -> RegionFeatures:
    rgb = check_color(img)
    seg = check_partition(seg, "seg")
    check_same_shape(rgb, seg, ("image", "seg"))
    lab = rgb_to_lab(rgb).reshape(-1, 3)
    labels, inverse = np.unique(seg.ravel(), return_inverse=True)
    counts = np.bincount(inverse, minlength=labels.size)
    sums = np.stack([np.bincount(inverse, weights=lab[:, c], minlength=labels.size) for c in range(3)], axis=1)
    return RegionFeatures(labels=labels, mean_lab=sums / counts[:, None], pixel_count=counts)


def affinity(features, sigma: float = 1.0) -> np.ndarray:
    """Dense Gaussian affinity ``exp(-||lab_i - lab_j||² / (2 sigma²))``.

    Entries that underflow are floored at the smallest positive double so
    the graph stays strictly positive.
    """
    if not sigma > 0:
        raise ParameterError(f"sigma must be > 0, got {sigma!r}")
    x = features.mean_lab if isinstance(features, RegionFeatures) else np.asarray(features, dtype=np.float64)
    if x.ndim != 2:
        raise ShapeError(f"features must be 2-D, got shape {x.shape}")
    diff = x[:, None, :] - x[None, :, :]
    sq = np.einsum("ijk,ijk->ij", diff, diff)
    w = np.exp(-sq / (2.0 * sigma * sigma))
    np.maximum(w, np.finfo(np.float64).tiny, out=w)
    np.fill_diagonal(w, 1.0)
    return w


def _check_affinity(w) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ShapeError(f"affinity must be square, got shape {w.shape}")
    if not np.allclose(w, w.T, rtol=0, atol=1e-12):
        raise ParameterError("affinity must be symmetric")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ParameterError("affinity must be finite and non-negative")
    return w


def normalized_laplacian(w) -> np.ndarray:
    """``I - D^{-1/2} W D^{-1/2}``."""
    w = _check_affinity(w)
    d = w.sum(axis=1)
    inv = np.where(d > 0, 1.0 / np.sqrt(np.where(d > 0, d, 1.0)), 0.0)
    lap = np.eye(w.shape[0]) - inv[:, None] * w * inv[None, :]
    return (lap + lap.T) / 2.0


def jacobi_eigh(a, tol: float = 1e-15, max_sweeps: int = 100):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns eigenvalues in ascending order and the matching column
    eigenvectors.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"matrix must be square, got shape {a.shape}")
    if a.shape[0] == 0:
        return np.empty(0), np.empty((0, 0))
    values, vectors, _ = _kernels.jacobi_eigh(np.ascontiguousarray(a), tol, max_sweeps)
    order = np.argsort(values, kind="stable")
    return values[order], vectors[:, order]


def _kmeans_pp(x, k, rng):
    n = x.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = np.sum((x - x[chosen[0]]) ** 2, axis=1)
    while len(chosen) < k:
        total = d2.sum()
        if total > 0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            # every point already coincides with a center
            rest = np.setdiff1d(np.arange(n), chosen)
            idx = int(rng.choice(rest))
        chosen.append(idx)
        d2 = np.minimum(d2, np.sum((x - x[idx]) ** 2, axis=1))
    return x[chosen].copy()


def kmeans(x, k: int, seed: int = 0, max_iter: int = 100):
    """Lloyd's k-means with k-means++ seeding.

    Returns ``(assignment, centers, inertia_history)``; iteration stops when
    the assignment no longer changes. A cluster that empties keeps its
    previous center.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    if not 1 <= k <= n:
        raise ParameterError(f"k must satisfy 1 <= k <= {n}, got {k}")
    rng = np.random.default_rng(seed)
    centers = _kmeans_pp(x, k, rng)
    assignment = None
    history = []
    for _ in range(max_iter):
        dist = np.sum((x[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        new = np.argmin(dist, axis=1)
        history.append(float(dist[np.arange(n), new].sum()))
        if assignment is not None and np.array_equal(new, assignment):
            break
        assignment = new
        for c in range(k):
            members = assignment == c
            if members.any():
                centers[c] = x[members].mean(axis=0)
    return assignment, centers, history


def relabel_sequential(assignment) -> np.ndarray:
    """Renumber cluster ids 0..k'-1 in order of first appearance."""
    assignment = np.asarray(assignment).ravel()
    _, first, inverse = np.unique(assignment, return_index=True, return_inverse=True)
    rank = np.argsort(np.argsort(first, kind="stable"), kind="stable")
    return rank[inverse].astype(np.int64)


def spectral_cluster(w, k: int, seed: int = 0) -> np.ndarray:
    """Normalized spectral clustering of a small dense affinity matrix.

    Returns a cluster index in ``0..k'-1`` per row of ``w``, ``k' <= k``.
    """
    w = _check_affinity(w)
    n = w.shape[0]
    if int(k) != k or not 1 <= k <= n:
        raise ParameterError(f"k must satisfy 1 <= k <= n={n}, got {k!r}")
    if k == 1:
        return np.zeros(n, dtype=np.int64)
    if k == n:
        return np.arange(n, dtype=np.int64)
    _, vectors = jacobi_eigh(normalized_laplacian(w))
    emb = vectors[:, :k]
    norms = np.linalg.norm(emb, axis=1, keepdims=True)
    emb = np.divide(emb, norms, out=np.zeros_like(emb), where=norms > 0)
    assignment, _, _ = kmeans(emb, k, seed=seed)
    return relabel_sequential(assignment)


def amr_sc(
    img,
    params: AmrParams | None = None,
    k: int = 2,
    sigma: float = 1.0,
    seed: int = 0,
    connectivity=Connectivity.EIGHT,
    gradient=None,
) -> np.ndarray:
    """AMR-SC segmentation of a color image.

    The AMR-WT pre-segmentation comes from the Sobel gradient of ``img``
    unless an external ``gradient`` is given. Returns labels ``1..k'``.
    """
    rgb = check_color(img)
    if gradient is None:
        pre = amr_wt(rgb, params, connectivity)
    else:
        pre = segment_gradient(amr(gradient, params).psi, connectivity)
    return cluster_regions(rgb, pre, k, sigma, seed)


def cluster_regions(img, seg, k: int, sigma: float = 1.0, seed: int = 0) -> np.ndarray:
    """Merge the regions of ``seg`` into at most ``k`` color clusters.

    Returns pixel labels ``1..k'`` numbered in raster order of first appearance.
    """
    rgb = check_color(img)
    feats = region_features(rgb, seg)
    if k > feats.region_count:
        warnings.warn(
            f"k={k} exceeds the {feats.region_count} pre-segmented regions; using k={feats.region_count}",
            stacklevel=2,
        )
        k = feats.region_count
    clusters = spectral_cluster(affinity(feats, sigma), k, seed)
    lut = np.zeros(int(feats.labels.max()) + 1, dtype=np.int64)
    lut[feats.labels] = clusters + 1
    return relabel_pixels(lut[np.asarray(seg)])


def relabel_pixels(labels) -> np.ndarray:
    """Renumber a label image 1..K in raster order of first appearance."""
    flat = np.asarray(labels).ravel()
    return (relabel_sequential(flat) + 1).reshape(np.shape(labels))
