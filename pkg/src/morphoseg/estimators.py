"""scikit-learn style wrappers around the segmentation pipelines.

``X`` is always a single image: ``(H, W)`` gray or gradient, or ``(H, W, 3)``
color. Hyper-parameters live in ``__init__`` so ``get_params``/``set_params``
and ``sklearn.base.clone`` work as usual.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .amr import AmrParams, amr
from .exceptions import ParameterError
from .gradient import image_gradient
from .hierarchy import build_hierarchy
from .spectral import affinity, cluster_regions, region_features
from .validation import check_color, check_connectivity, check_gray, check_image
from .watershed import regional_minima, watershed_from_markers

__all__ = [
    "SobelGradient",
    "AdaptiveReconstruction",
    "AMRWatershed",
    "AMRSpectralSegmentation",
    "AMRHierarchy",
]


def _gradient_of(X, source: str) -> np.ndarray:
    if source == "sobel":
        return image_gradient(X)
    if source == "precomputed":
        return check_gray(X, "gradient")
    raise ParameterError(f"gradient must be 'sobel' or 'precomputed', got {source!r}")


class SobelGradient(TransformerMixin, BaseEstimator):
    """Normalized Sobel magnitude of a gray or color image."""

    def fit(self, X, y=None):
        check_image(X)
        return self

    def transform(self, X):
        return image_gradient(X)


class AdaptiveReconstruction(TransformerMixin, BaseEstimator):
    """Transform a gradient image with AMR.

    Attributes set by ``fit``: ``psi_``, ``iterations_used_``, ``gap_history_``.
    """

    def __init__(self, s=2, m=50, eta=1e-4):
        self.s = s
        self.m = m
        self.eta = eta

    def _params(self) -> AmrParams:
        return AmrParams(s=self.s, m=self.m, eta=self.eta)

    def fit(self, X, y=None):
        result = amr(X, self._params())
        self.psi_ = result.psi
        self.iterations_used_ = result.iterations_used
        self.gap_history_ = result.gap_history
        return self

    def transform(self, X):
        return amr(X, self._params()).psi


class AMRWatershed(ClusterMixin, BaseEstimator):
    """AMR-WT segmentation.

    Parameters
    ----------
    s, m, eta : AMR scale range and stopping threshold.
    connectivity : {4, 8}
        Connectivity for minima extraction and flooding.
    gradient : {"sobel", "precomputed"}
        Whether ``X`` is an image to differentiate or already a gradient.

    Attributes
    ----------
    gradient_, reconstruction_, seeds_, labels_, n_regions_, iterations_used_
    """

    def __init__(self, s=2, m=50, eta=1e-4, connectivity=8, gradient="sobel"):
        self.s = s
        self.m = m
        self.eta = eta
        self.connectivity = connectivity
        self.gradient = gradient

    def fit(self, X, y=None):
        conn = check_connectivity(self.connectivity)
        g = _gradient_of(X, self.gradient)
        result = amr(g, AmrParams(s=self.s, m=self.m, eta=self.eta))
        self.gradient_ = g
        self.reconstruction_ = result.psi
        self.iterations_used_ = result.iterations_used
        self.seeds_ = regional_minima(result.psi, conn)
        self.labels_ = watershed_from_markers(result.psi, self.seeds_, conn)
        self.n_regions_ = int(self.labels_.max())
        return self


class AMRSpectralSegmentation(ClusterMixin, BaseEstimator):
    """AMR-SC: spectral grouping of AMR-WT regions by mean CIELAB color."""

    def __init__(self, n_clusters=2, sigma=1.0, s=2, m=50, eta=1e-4, connectivity=8, random_state=0):
        self.n_clusters = n_clusters
        self.sigma = sigma
        self.s = s
        self.m = m
        self.eta = eta
        self.connectivity = connectivity
        self.random_state = random_state

    def fit(self, X, y=None, gradient=None):
        rgb = check_color(X)
        pre = AMRWatershed(
            s=self.s, m=self.m, eta=self.eta, connectivity=self.connectivity,
            gradient="precomputed" if gradient is not None else "sobel",
        ).fit(gradient if gradient is not None else rgb)
        self.presegmentation_ = pre.labels_
        self.features_ = region_features(rgb, pre.labels_)
        self.affinity_ = affinity(self.features_, self.sigma)
        self.labels_ = cluster_regions(rgb, pre.labels_, self.n_clusters, self.sigma, self.random_state)
        self.n_regions_ = int(self.labels_.max())
        return self


class AMRHierarchy(TransformerMixin, BaseEstimator):
    """Nested partitions for AMR caps ``m = s..m_max`` (``hierarchy_`` after fit)."""

    def __init__(self, s=1, m_max=10, connectivity=8, gradient="sobel"):
        self.s = s
        self.m_max = m_max
        self.connectivity = connectivity
        self.gradient = gradient

    def fit(self, X, y=None):
        g = _gradient_of(X, self.gradient)
        self.hierarchy_ = build_hierarchy(g, self.s, self.m_max, self.connectivity, precomputed_gradient=True)
        return self

    def transform(self, X):
        """Stacked label levels, shape ``(n_levels, H, W)``, of the fitted image."""
        check_is_fitted(self, "hierarchy_")
        return np.stack(self.hierarchy_.levels)
