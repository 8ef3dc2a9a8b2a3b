"""Adaptive morphological reconstruction (AMR).

The reconstructed gradient is the pointwise maximum of closing-by-reconstruction
results over growing disks ``b_s, b_{s+1}, ..., b_m``. Scales are added in
ascending order and the loop stops early once adding a scale changes the
running maximum by at most ``eta``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .exceptions import ParameterError
from .morphology import closing_by_reconstruction, disk
from .validation import check_gray, check_same_shape

__all__ = ["AmrParams", "AmrResult", "amr", "amr_sequence", "convergence_gap"]


@dataclass(frozen=True)
class AmrParams:
    """Scale range and stopping threshold.

    ``eta=None`` disables early stopping, so every scale up to ``m`` is folded
    in. That is the exact ``psi(g, s, m)``.
    """

    s: int = 2
    m: int = 50
    eta: Optional[float] = 1e-4

    def __post_init__(self):
        if int(self.s) != self.s or self.s < 1:
            raise ParameterError(f"s must be an integer >= 1, got {self.s!r}")
        if int(self.m) != self.m or self.m < self.s:
            raise ParameterError(f"m must be an integer >= s={self.s}, got {self.m!r}")
        if self.eta is not None and not (np.isfinite(self.eta) and self.eta >= 0):
            raise ParameterError(f"eta must be >= 0 or None, got {self.eta!r}")


@dataclass(frozen=True)
class AmrResult:
    psi: np.ndarray
    iterations_used: int
    gap_history: tuple


def convergence_gap(prev, cur) -> float:
    """Largest absolute pixel change between two consecutive reconstructions."""
    prev = np.asarray(prev, dtype=np.float64)
    cur = np.asarray(cur, dtype=np.float64)
    check_same_shape(prev, cur, ("prev", "cur"))
    return float(np.max(np.abs(cur - prev)))


def amr_sequence(g, s: int, m: int) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(i, psi(g, s, i))`` for ``i = s..m`` without early stopping."""
    g = check_gray(g, "gradient")
    psi = None
    for i in range(s, m + 1):
        term = closing_by_reconstruction(g, disk(i))
        psi = term if psi is None else np.maximum(psi, term)
        yield i, psi


def amr(g, params: AmrParams | None = None) -> AmrResult:
    """Adaptive morphological reconstruction of a gradient image.

    Parameters
    ----------
    g : ndarray of shape (H, W)
        Gradient image with samples in [0, 1].
    params : AmrParams, optional
        Defaults to ``s=2, m=50, eta=1e-4``.

    Returns
    -------
    AmrResult
        ``psi`` is the reconstructed gradient, ``iterations_used`` the last
        scale folded in, ``gap_history`` the per-scale gap, whose first entry
        is ``max(psi)`` at scale ``s``.
    """
    p = params if params is not None else AmrParams()
    if not isinstance(p, AmrParams):
        raise ParameterError(f"params must be AmrParams, got {type(p).__name__}")
    history = []
    psi = None
    used = p.s
    for i, cur in amr_sequence(g, p.s, p.m):
        used = i
        if psi is None:
            history.append(float(np.max(np.abs(cur))))
            psi = cur
            continue
        gap = convergence_gap(psi, cur)
        history.append(gap)
        psi = cur
        # the threshold is only tested once a second scale exists
        if p.eta is not None and gap <= p.eta:
            break
    return AmrResult(psi=psi, iterations_used=used, gap_history=tuple(history))
