"""Slow, obviously-correct reference implementations used only by the tests."""

import heapq
import itertools

import numpy as np
from scipy import ndimage


def disk_offsets(radius):
    return [
        (dy, dx)
        for dy in range(-radius, radius + 1)
        for dx in range(-radius, radius + 1)
        if dx * dx + dy * dy <= radius * radius
    ]


def brute_filter(img, radius, reduce):
    h, w = img.shape
    out = np.empty_like(img)
    offs = disk_offsets(radius)
    for y in range(h):
        for x in range(w):
            vals = [img[y + dy, x + dx] for dy, dx in offs if 0 <= y + dy < h and 0 <= x + dx < w]
            out[y, x] = reduce(vals)
    return out


def brute_dilate(img, radius):
    return brute_filter(img, radius, max)


def brute_erode(img, radius):
    return brute_filter(img, radius, min)


def _shift_max4(r):
    out = r.copy()
    out[1:, :] = np.maximum(out[1:, :], r[:-1, :])
    out[:-1, :] = np.maximum(out[:-1, :], r[1:, :])
    out[:, 1:] = np.maximum(out[:, 1:], r[:, :-1])
    out[:, :-1] = np.maximum(out[:, :-1], r[:, 1:])
    return out


def naive_reconstruct_dilation(f, g):
    """Iterate r <- dilate4(r) ∧ g until nothing changes."""
    r = np.minimum(f, g)
    while True:
        nxt = np.minimum(_shift_max4(r), g)
        if np.array_equal(nxt, r):
            return r
        r = nxt


def naive_reconstruct_erosion(f, g):
    return -naive_reconstruct_dilation(-f, -g)


def naive_closing(g, radius):
    if radius == 0:
        return g.copy()
    r1 = naive_reconstruct_dilation(brute_erode(g, radius), g)
    return naive_reconstruct_erosion(brute_dilate(r1, radius), r1)


def brute_regional_minima(g, conn):
    """Label plateaus with scipy, keep those whose outer neighbors are all higher."""
    structure = ndimage.generate_binary_structure(2, 1 if conn == 4 else 2)
    keep = []
    for v in np.unique(g):
        comps, n = ndimage.label(g == v, structure=structure)
        for c in range(1, n + 1):
            region = comps == c
            ring = ndimage.binary_dilation(region, structure=structure) & ~region
            if np.all(g[ring] > v):
                first = np.flatnonzero(region.ravel())[0]
                keep.append((first, region))
    keep.sort(key=lambda t: t[0])
    out = np.zeros(g.shape, dtype=np.int64)
    for label, (_, region) in enumerate(keep, start=1):
        out[region] = label
    return out


def heapq_flood(g, seeds, conn):
    """Priority flood with (value, insertion counter) keys via heapq."""
    h, w = g.shape
    if conn == 4:
        offs = [(-1, 0), (0, -1), (0, 1), (1, 0)]
    else:
        offs = [(dy, dx) for dy in (-1, 0, 1) for dx in (-1, 0, 1) if (dy, dx) != (0, 0)]
    labels = seeds.copy()
    heap = []
    counter = itertools.count()
    for y in range(h):
        for x in range(w):
            if seeds[y, x] == 0:
                continue
            for dy, dx in offs:
                yy, xx = y + dy, x + dx
                if 0 <= yy < h and 0 <= xx < w and labels[yy, xx] == 0:
                    labels[yy, xx] = labels[y, x]
                    heapq.heappush(heap, (g[yy, xx], next(counter), yy, xx))
    while heap:
        _, _, y, x = heapq.heappop(heap)
        for dy, dx in offs:
            yy, xx = y + dy, x + dx
            if 0 <= yy < h and 0 <= xx < w and labels[yy, xx] == 0:
                labels[yy, xx] = labels[y, x]
                heapq.heappush(heap, (g[yy, xx], next(counter), yy, xx))
    return labels


def all_pairs_rand(a, b):
    a = a.ravel()
    b = b.ravel()
    agree = total = 0
    for i in range(a.size):
        for j in range(i + 1, a.size):
            total += 1
            agree += (a[i] == a[j]) == (b[i] == b[j])
    return agree / total


def entropy_vi(a, b):
    a = a.ravel()
    b = b.ravel()
    n = a.size
    joint = {}
    for x, y in zip(a, b):
        joint[(x, y)] = joint.get((x, y), 0) + 1
    pa = {x: np.count_nonzero(a == x) / n for x in set(a)}
    pb = {y: np.count_nonzero(b == y) / n for y in set(b)}
    h_a = -sum(p * np.log2(p) for p in pa.values())
    h_b = -sum(p * np.log2(p) for p in pb.values())
    mi = sum((c / n) * np.log2((c / n) / (pa[x] * pb[y])) for (x, y), c in joint.items())
    return h_a + h_b - 2 * mi


def exhaustive_covering(seg, gt):
    n = seg.size
    total = 0.0
    for r in np.unique(gt):
        region = gt == r
        best = 0.0
        for s in np.unique(seg):
            other = seg == s
            iou = np.count_nonzero(region & other) / np.count_nonzero(region | other)
            best = max(best, iou)
        total += np.count_nonzero(region) / n * best
    return total


def direct_sobel(img):
    """Unnormalized Sobel magnitude via scipy convolution, replicated border."""
    kx = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=float)
    gx = ndimage.correlate(img, kx, mode="nearest")
    gy = ndimage.correlate(img, kx.T, mode="nearest")
    return np.sqrt(gx**2 + gy**2)


def random_partition(rng, shape, k):
    return rng.integers(1, k + 1, size=shape)
