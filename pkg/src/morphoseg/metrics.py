"""Region benchmarks: probabilistic Rand index, segmentation covering, variation of information.

All scores are computed from the label contingency table. VI is reported in
bits. With several ground truths, each score is the mean over them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix

from .exceptions import ParameterError
from .validation import check_labels, check_same_shape

__all__ = [
    "MetricReport",
    "contingency_table",
    "rand_index",
    "pri",
    "covering",
    "vi",
    "evaluate",
]


@dataclass(frozen=True)
class MetricReport:
    pri: float
    cv: float
    vi: float
    vi_unit: str = "bits"


def contingency_table(a, b) -> np.ndarray:
    """Dense ``(n_labels_a, n_labels_b)`` joint pixel-count table."""
    a = check_labels(a, "a")
    b = check_labels(b, "b")
    check_same_shape(a, b)
    _, ia = np.unique(a.ravel(), return_inverse=True)
    _, ib = np.unique(b.ravel(), return_inverse=True)
    ones = np.ones(ia.size, dtype=np.int64)
    return coo_matrix((ones, (ia, ib))).toarray()


def _pairs(x):
    x = np.asarray(x, dtype=np.float64)
    return x * (x - 1.0) / 2.0


def rand_index(a, b) -> float:
    """Fraction of unordered pixel pairs on which ``a`` and ``b`` agree."""
    table = contingency_table(a, b)
    n = table.sum()
    total = _pairs(n)
    if total == 0:
        return 1.0
    same_both = _pairs(table).sum()
    same_a = _pairs(table.sum(axis=1)).sum()
    same_b = _pairs(table.sum(axis=0)).sum()
    return float((total + 2.0 * same_both - same_a - same_b) / total)


def _as_list(gts) -> list:
    if isinstance(gts, np.ndarray) and gts.ndim == 2:
        return [gts]
    gts = list(gts)
    if not gts:
        raise ParameterError("at least one ground truth is required")
    return gts


def pri(seg, gts: Sequence) -> float:
    """Probabilistic Rand index: mean Rand index against every ground truth."""
    return float(np.mean([rand_index(seg, gt) for gt in _as_list(gts)]))


def _covering_one(seg, gt) -> float:
    table = contingency_table(gt, seg)
    gt_sizes = table.sum(axis=1)
    seg_sizes = table.sum(axis=0)
    union = gt_sizes[:, None] + seg_sizes[None, :] - table
    best = (table / union).max(axis=1)
    return float((gt_sizes * best).sum() / gt_sizes.sum())


def covering(seg, gt) -> float:
    """Covering of the ground truth by ``seg``: size-weighted best IoU per gt region."""
    return float(np.mean([_covering_one(seg, g) for g in _as_list(gt)]))


def _vi_one(seg, gt) -> float:
    table = contingency_table(seg, gt).astype(np.float64)
    p = table / table.sum()
    pa = p.sum(axis=1)
    pb = p.sum(axis=0)
    i, j = np.nonzero(p)
    pij = p[i, j]
    # H(a|b) + H(b|a), summed termwise so every contribution is non-negative
    return float(np.sum(pij * (np.log2(pa[i] / pij) + np.log2(pb[j] / pij))))


def vi(seg, gt) -> float:
    """Variation of information H(seg) + H(gt) - 2 I(seg; gt), in bits."""
    return float(np.mean([_vi_one(seg, g) for g in _as_list(gt)]))


def evaluate(seg, gts) -> MetricReport:
    gts = _as_list(gts)
    return MetricReport(pri=pri(seg, gts), cv=covering(seg, gts), vi=vi(seg, gts))
