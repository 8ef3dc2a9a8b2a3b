"""Hierarchical segmentation indexed by the AMR scale cap.

Level 0 is the watershed of the raw gradient; level ``z >= 1`` is the
watershed of ``psi(g, s, s + z - 1)`` with early stopping disabled, so the
gradients of successive levels increase pointwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .amr import amr_sequence
from .exceptions import ParameterError
from .gradient import image_gradient
from .validation import check_gray, check_partition, check_same_shape
from .watershed import Connectivity, segment_gradient

__all__ = ["Hierarchy", "build_hierarchy", "is_refinement"]


def is_refinement(fine, coarse) -> tuple[bool, int]:
    """Check that every region of ``fine`` lies inside one region of ``coarse``.

    Returns ``(ok, violations)`` where ``violations`` counts fine regions that
    overlap two or more coarse regions.
    """
    fine = check_partition(fine, "fine")
    coarse = check_partition(coarse, "coarse")
    check_same_shape(fine, coarse, ("fine", "coarse"))
    pairs = np.unique(np.stack([fine.ravel(), coarse.ravel()]), axis=1)
    _, per_fine = np.unique(pairs[0], return_counts=True)
    violations = int(np.count_nonzero(per_fine > 1))
    return violations == 0, violations


@dataclass
class Hierarchy:
    """Ordered partitions, finest first.

    ``scale_caps[z]`` is the AMR cap ``m`` of level ``z`` (``None`` for the
    raw-gradient level 0).
    """

    levels: list
    scale_caps: list
    s: int
    region_counts: list = field(init=False)

    def __post_init__(self):
        shapes = {lvl.shape for lvl in self.levels}
        if len(shapes) > 1:
            raise ParameterError(f"hierarchy levels differ in shape: {sorted(shapes)}")
        self.region_counts = [int(np.unique(lvl).size) for lvl in self.levels]

    def __len__(self) -> int:
        return len(self.levels)

    def __getitem__(self, z):
        return self.levels[z]

    def refinement(self) -> list[tuple[bool, int]]:
        """``is_refinement(levels[z], levels[z + 1])`` for every adjacent pair."""
        return [is_refinement(a, b) for a, b in zip(self.levels, self.levels[1:])]

    def nesting_fraction(self) -> float:
        checks = self.refinement()
        if not checks:
            return 1.0
        return sum(ok for ok, _ in checks) / len(checks)

    def manifest(self) -> list[dict]:
        ok = [True] + [r[0] for r in self.refinement()]
        return [
            {
                "level": z,
                "scale_cap": cap,
                "region_count": count,
                "refinement_ok": bool(ok[z]),
            }
            for z, (cap, count) in enumerate(zip(self.scale_caps, self.region_counts))
        ]


def build_hierarchy(
    image,
    s: int = 1,
    m_max: int = 10,
    connectivity=Connectivity.EIGHT,
    *,
    precomputed_gradient: bool = False,
    gradient: Optional[np.ndarray] = None,
) -> Hierarchy:
    """Watershed partitions for the raw gradient and every cap ``m = s..m_max``.

    ``refinement_ok`` of level ``z`` in the manifest tells whether level
    ``z - 1`` refines it.
    """
    if int(s) != s or s < 1:
        raise ParameterError(f"s must be an integer >= 1, got {s!r}")
    if int(m_max) != m_max or m_max < s:
        raise ParameterError(f"m_max must be an integer >= s={s}, got {m_max!r}")
    if gradient is not None:
        g = check_gray(gradient, "gradient")
    elif precomputed_gradient:
        g = check_gray(image, "gradient")
    else:
        g = image_gradient(image)
    levels = [segment_gradient(g, connectivity)]
    caps: list = [None]
    for m, psi in amr_sequence(g, s, m_max):
        levels.append(segment_gradient(psi, connectivity))
        caps.append(m)
    return Hierarchy(levels=levels, scale_caps=caps, s=s)
