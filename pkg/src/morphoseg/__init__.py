"""Adaptive morphological reconstruction and seeded image segmentation."""

__version__ = "0.1.0"

from .amr import AmrParams, AmrResult, amr, convergence_gap
from .color import rgb_to_lab, to_gray
from .estimators import (
    AdaptiveReconstruction,
    AMRHierarchy,
    AMRSpectralSegmentation,
    AMRWatershed,
    SobelGradient,
)
from .gradient import image_gradient, load_gradient, sobel_gradient
from .hierarchy import Hierarchy, build_hierarchy, is_refinement
from .io import load_image, load_labels, save_labels
from .metrics import MetricReport, covering, pri, rand_index, vi
from .morphology import (
    closing_by_reconstruction,
    dilate,
    disk,
    erode,
    opening_by_reconstruction,
    reconstruct_dilation,
    reconstruct_erosion,
)
from .spectral import affinity, amr_sc, region_features, spectral_cluster
from .watershed import Connectivity, amr_wt, regional_minima, watershed_from_markers

__all__ = [
    "AdaptiveReconstruction",
    "AMRHierarchy",
    "AMRSpectralSegmentation",
    "AMRWatershed",
    "AmrParams",
    "AmrResult",
    "Connectivity",
    "Hierarchy",
    "MetricReport",
    "SobelGradient",
    "affinity",
    "amr",
    "amr_sc",
    "amr_wt",
    "build_hierarchy",
    "closing_by_reconstruction",
    "convergence_gap",
    "covering",
    "dilate",
    "disk",
    "erode",
    "is_refinement",
    "image_gradient",
    "load_gradient",
    "load_image",
    "load_labels",
    "opening_by_reconstruction",
    "pri",
    "rand_index",
    "reconstruct_dilation",
    "reconstruct_erosion",
    "region_features",
    "regional_minima",
    "rgb_to_lab",
    "save_labels",
    "sobel_gradient",
    "spectral_cluster",
    "to_gray",
    "vi",
    "watershed_from_markers",
]
