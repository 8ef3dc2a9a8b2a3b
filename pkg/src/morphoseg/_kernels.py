"""Compiled inner loops (numba). Callers validate inputs; kernels do not."""

import numpy as np
from numba import njit

_JIT = dict(cache=True, nogil=True)

# (dy, dx) neighbor offsets; the first half precedes the pixel in raster order
OFFSETS_4 = np.array([[-1, 0], [0, -1], [0, 1], [1, 0]], dtype=np.int64)
OFFSETS_8 = np.array(
    [[-1, -1], [-1, 0], [-1, 1], [0, -1], [0, 1], [1, -1], [1, 0], [1, 1]], dtype=np.int64
)


def offsets_for(conn: int) -> np.ndarray:
    return OFFSETS_4 if conn == 4 else OFFSETS_8


@njit(**_JIT)
def reconstruct_dilation_hybrid(marker, mask, offsets):
    """Grayscale reconstruction by dilation: raster + anti-raster scan, then FIFO.

    ``marker <= mask`` is assumed. Returns a new array.
    """
    h, w = mask.shape
    n = h * w
    r = marker.copy().ravel()
    g = mask.ravel()
    k = offsets.shape[0]
    half = k // 2

    # forward raster scan over preceding neighbors
    for y in range(h):
        for x in range(w):
            p = y * w + x
            v = r[p]
            for j in range(half):
                yy = y + offsets[j, 0]
                xx = x + offsets[j, 1]
                if 0 <= yy < h and 0 <= xx < w:
                    q = r[yy * w + xx]
                    if q > v:
                        v = q
            r[p] = v if v < g[p] else g[p]

    queue = np.empty(n, dtype=np.int64)
    queued = np.zeros(n, dtype=np.bool_)
    head = 0
    size = 0

    # backward scan over succeeding neighbors; seed the queue
    for y in range(h - 1, -1, -1):
        for x in range(w - 1, -1, -1):
            p = y * w + x
            v = r[p]
            for j in range(half, k):
                yy = y + offsets[j, 0]
                xx = x + offsets[j, 1]
                if 0 <= yy < h and 0 <= xx < w:
                    q = r[yy * w + xx]
                    if q > v:
                        v = q
            v = v if v < g[p] else g[p]
            r[p] = v
            for j in range(half, k):
                yy = y + offsets[j, 0]
                xx = x + offsets[j, 1]
                if 0 <= yy < h and 0 <= xx < w:
                    qi = yy * w + xx
                    if r[qi] < v and r[qi] < g[qi]:
                        if not queued[p]:
                            queued[p] = True
                            queue[(head + size) % n] = p
                            size += 1
                        break

    # FIFO propagation
    while size > 0:
        p = queue[head]
        head = (head + 1) % n
        size -= 1
        queued[p] = False
        y = p // w
        x = p - y * w
        v = r[p]
        for j in range(k):
            yy = y + offsets[j, 0]
            xx = x + offsets[j, 1]
            if 0 <= yy < h and 0 <= xx < w:
                qi = yy * w + xx
                if r[qi] < v and r[qi] != g[qi]:
                    r[qi] = v if v < g[qi] else g[qi]
                    if not queued[qi]:
                        queued[qi] = True
                        queue[(head + size) % n] = qi
                        size += 1
    return r.reshape(h, w)


@njit(**_JIT)
def regional_minima_labels(g, offsets):
    """Label regional-minimum plateaus 1..K in raster order of first pixel."""
    h, w = g.shape
    n = h * w
    flat = g.ravel()
    labels = np.zeros(n, dtype=np.int64)
    seen = np.zeros(n, dtype=np.bool_)
    stack = np.empty(n, dtype=np.int64)
    members = np.empty(n, dtype=np.int64)
    k = offsets.shape[0]
    next_label = 1
    for start in range(n):
        if seen[start]:
            continue
        v = flat[start]
        seen[start] = True
        top = 0
        stack[top] = start
        top += 1
        count = 0
        is_min = True
        while top > 0:
            top -= 1
            p = stack[top]
            members[count] = p
            count += 1
            y = p // w
            x = p - y * w
            for j in range(k):
                yy = y + offsets[j, 0]
                xx = x + offsets[j, 1]
                if 0 <= yy < h and 0 <= xx < w:
                    q = yy * w + xx
                    fq = flat[q]
                    if fq < v:
                        is_min = False
                    elif fq == v and not seen[q]:
                        seen[q] = True
                        stack[top] = q
                        top += 1
        if is_min:
            for i in range(count):
                labels[members[i]] = next_label
            next_label += 1
    return labels.reshape(h, w), next_label - 1


@njit(**_JIT)
def _heap_push(pri, age, idx, size, p, a, i):
    pos = size
    pri[pos] = p
    age[pos] = a
    idx[pos] = i
    while pos > 0:
        parent = (pos - 1) >> 1
        if pri[parent] < pri[pos] or (pri[parent] == pri[pos] and age[parent] < age[pos]):
            break
        pri[parent], pri[pos] = pri[pos], pri[parent]
        age[parent], age[pos] = age[pos], age[parent]
        idx[parent], idx[pos] = idx[pos], idx[parent]
        pos = parent
    return size + 1


@njit(**_JIT)
def _heap_pop(pri, age, idx, size):
    out = idx[0]
    size -= 1
    pri[0] = pri[size]
    age[0] = age[size]
    idx[0] = idx[size]
    pos = 0
    while True:
        left = 2 * pos + 1
        if left >= size:
            break
        best = left
        right = left + 1
        if right < size and (
            pri[right] < pri[left] or (pri[right] == pri[left] and age[right] < age[left])
        ):
            best = right
        if pri[pos] < pri[best] or (pri[pos] == pri[best] and age[pos] < age[best]):
            break
        pri[best], pri[pos] = pri[pos], pri[best]
        age[best], age[pos] = age[pos], age[best]
        idx[best], idx[pos] = idx[pos], idx[best]
        pos = best
    return out, size


@njit(**_JIT)
def meyer_flood(g, seeds, offsets):
    """Seeded flooding without watershed lines.

    Priority is the gradient value, ties broken by insertion order. A pixel
    is labelled when first reached, by the neighbor being expanded.
    """
    h, w = g.shape
    n = h * w
    flat = g.ravel()
    labels = seeds.copy().ravel()
    pri = np.empty(n, dtype=np.float64)
    age = np.empty(n, dtype=np.int64)
    idx = np.empty(n, dtype=np.int64)
    size = 0
    counter = 0
    k = offsets.shape[0]

    original = seeds.ravel()
    for p in range(n):
        if original[p] == 0:
            continue
        y = p // w
        x = p - y * w
        for j in range(k):
            yy = y + offsets[j, 0]
            xx = x + offsets[j, 1]
            if 0 <= yy < h and 0 <= xx < w:
                q = yy * w + xx
                if labels[q] == 0:
                    labels[q] = labels[p]
                    size = _heap_push(pri, age, idx, size, flat[q], counter, q)
                    counter += 1

    while size > 0:
        p, size = _heap_pop(pri, age, idx, size)
        y = p // w
        x = p - y * w
        for j in range(k):
            yy = y + offsets[j, 0]
            xx = x + offsets[j, 1]
            if 0 <= yy < h and 0 <= xx < w:
                q = yy * w + xx
                if labels[q] == 0:
                    labels[q] = labels[p]
                    size = _heap_push(pri, age, idx, size, flat[q], counter, q)
                    counter += 1
    return labels.reshape(h, w)


@njit(**_JIT)
def jacobi_eigh(a, tol, max_sweeps):
    """Cyclic Jacobi eigen-decomposition of a symmetric matrix.

    Returns ``(eigenvalues, eigenvectors, sweeps)``; eigenvectors are columns,
    unsorted.
    """
    n = a.shape[0]
    A = a.copy()
    V = np.eye(n)
    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale += A[i, j] * A[i, j]
    threshold = tol * tol * max(scale, 1e-300)
    sweeps = 0
    for sweep in range(max_sweeps):
        off = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off += A[i, j] * A[i, j]
        if 2.0 * off <= threshold:
            break
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(1.0 + theta * theta))
                else:
                    t = -1.0 / (-theta + np.sqrt(1.0 + theta * theta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                for r in range(n):
                    arp = A[r, p]
                    arq = A[r, q]
                    A[r, p] = c * arp - s * arq
                    A[r, q] = s * arp + c * arq
                for r in range(n):
                    apr = A[p, r]
                    aqr = A[q, r]
                    A[p, r] = c * apr - s * aqr
                    A[q, r] = s * apr + c * aqr
                for r in range(n):
                    vrp = V[r, p]
                    vrq = V[r, q]
                    V[r, p] = c * vrp - s * vrq
                    V[r, q] = s * vrp + c * vrq
    w = np.empty(n)
    for i in range(n):
        w[i] = A[i, i]
    return w, V, sweeps
