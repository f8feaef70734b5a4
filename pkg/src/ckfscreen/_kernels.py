"""Compiled per-feature kernels.

Single-column routines are plain ``njit`` functions; the ``*_columns`` and
``*_pairs`` variants fan out over columns with ``prange``.  Every column is
computed independently with a fixed operation order, so results do not depend
on the number of threads.

Degenerate columns are reported as NaN; the Python layer decides whether that
becomes an exception or a zero score.
"""
import os

import numba
import numpy as np
from numba import prange

if "NUMBA_THREADING_LAYER" not in os.environ:
    # the default probe tries TBB first and warns on old installs
    try:
        from numba.np.ufunc import omppool  # noqa: F401

        numba.config.THREADING_LAYER = "omp"
    except ImportError:
        pass

_JIT = dict(nopython=True, cache=True, nogil=True)


@numba.jit(**_JIT)
def dense_rank(v):
    """Dense 0-based ranks of ``v`` plus per-rank counts and the rank count."""
    n = v.shape[0]
    order = np.argsort(v, kind="mergesort")
    ranks = np.empty(n, dtype=np.int64)
    tot = np.zeros(n, dtype=np.int64)
    r = -1
    for k in range(n):
        i = order[k]
        if k == 0 or v[i] != v[order[k - 1]]:
            r += 1
        ranks[i] = r
        tot[r] += 1
    return ranks, tot[: r + 1], r + 1


@numba.jit(**_JIT)
def ks_sweep_single(x, yr, tot, m, split_idx, vals, counts):
    """KS statistic of ``y | x <= v`` against ``y | x > v`` for every distinct v.

    ``yr``/``tot``/``m`` are the dense ranks of y.  Writes, per split, the
    position (in ascending x order) of the last observation at that split,
    its KS value and the number of observations tied at the split.  Returns
    the number of splits.
    """
    n = x.shape[0]
    order = np.argsort(x, kind="mergesort")
    cnt = np.zeros(m, dtype=np.int64)
    s = 0
    start = 0
    for k in range(n):
        cnt[yr[order[k]]] += 1
        if k < n - 1 and x[order[k + 1]] == x[order[k]]:
            continue
        nlow = k + 1
        nhigh = n - nlow
        best = 0.0
        if nhigh > 0:
            cl = 0
            ct = 0
            for r in range(m):
                cl += cnt[r]
                ct += tot[r]
                d = abs(cl / nlow - (ct - cl) / nhigh)
                if d > best:
                    best = d
        split_idx[s] = k
        vals[s] = best
        counts[s] = k + 1 - start
        start = k + 1
        s += 1
    return s


@numba.jit(**_JIT)
def ckf_single(x, yr, tot, m):
    n = x.shape[0]
    split_idx = np.empty(n, dtype=np.int64)
    vals = np.empty(n)
    counts = np.empty(n, dtype=np.int64)
    s = ks_sweep_single(x, yr, tot, m, split_idx, vals, counts)
    acc = 0.0
    for i in range(s):
        acc += vals[i] * counts[i]
    return acc / n


@numba.jit(**_JIT)
def binary_single(x, yr, tot, m):
    n = x.shape[0]
    xs = np.sort(x)
    med = xs[(n - 1) // 2]
    cnt = np.zeros(m, dtype=np.int64)
    nlow = 0
    for i in range(n):
        if x[i] <= med:
            cnt[yr[i]] += 1
            nlow += 1
    nhigh = n - nlow
    if nhigh == 0:
        return np.nan
    best = 0.0
    cl = 0
    ct = 0
    for r in range(m):
        cl += cnt[r]
        ct += tot[r]
        d = abs(cl / nlow - (ct - cl) / nhigh)
        if d > best:
            best = d
    return best


@numba.jit(**_JIT)
def slice_labels(y, cut_idx):
    """Slice index of each response given the order-statistic positions of the cuts.

    Slice g holds responses in (a_{g-1}, a_g] where a_g = sorted(y)[cut_idx[g-1]].
    Returns labels and per-slice sizes.
    """
    n = y.shape[0]
    ys = np.sort(y)
    ncut = cut_idx.shape[0]
    cuts = np.empty(ncut)
    for g in range(ncut):
        cuts[g] = ys[cut_idx[g]]
    labels = np.empty(n, dtype=np.int64)
    sizes = np.zeros(ncut + 1, dtype=np.int64)
    for i in range(n):
        g = 0
        while g < ncut and y[i] > cuts[g]:
            g += 1
        labels[i] = g
        sizes[g] += 1
    return labels, sizes


@numba.jit(**_JIT)
def slice_single(x, labels, sizes):
    """Largest pairwise KS distance between the x-samples of the response slices."""
    n = x.shape[0]
    G = sizes.shape[0]
    for g in range(G):
        if sizes[g] == 0:
            return np.nan
    order = np.argsort(x, kind="mergesort")
    cnt = np.zeros(G, dtype=np.int64)
    best = 0.0
    for k in range(n):
        cnt[labels[order[k]]] += 1
        if k < n - 1 and x[order[k + 1]] == x[order[k]]:
            continue
        for a in range(G):
            fa = cnt[a] / sizes[a]
            for b in range(a + 1, G):
                d = abs(fa - cnt[b] / sizes[b])
                if d > best:
                    best = d
    return best


@numba.jit(**_JIT)
def centered_distances(v):
    """Double-centered |v_i - v_j| matrix."""
    n = v.shape[0]
    a = np.empty((n, n))
    row = np.zeros(n)
    for i in range(n):
        for j in range(n):
            d = abs(v[i] - v[j])
            a[i, j] = d
            row[i] += d
    grand = 0.0
    for i in range(n):
        grand += row[i]
        row[i] /= n
    grand /= n * n
    for i in range(n):
        for j in range(n):
            a[i, j] = a[i, j] - row[i] - row[j] + grand
    return a


@numba.jit(**_JIT)
def mean_square(a):
    n = a.shape[0]
    acc = 0.0
    for i in range(n):
        for j in range(n):
            acc += a[i, j] * a[i, j]
    return acc / (n * n)


@numba.jit(**_JIT)
def dcor_single(x, bc, bvar):
    """Squared sample distance correlation given the centered response matrix."""
    n = x.shape[0]
    row = np.zeros(n)
    for i in range(n):
        s = 0.0
        for j in range(n):
            s += abs(x[i] - x[j])
        row[i] = s
    grand = 0.0
    for i in range(n):
        grand += row[i]
        row[i] /= n
    grand /= n * n
    cross = 0.0
    avar = 0.0
    for i in range(n):
        for j in range(n):
            a = abs(x[i] - x[j]) - row[i] - row[j] + grand
            cross += a * bc[i, j]
            avar += a * a
    cross /= n * n
    avar /= n * n
    if avar <= 0.0 or bvar <= 0.0:
        return 0.0
    denom = np.sqrt(avar) * np.sqrt(bvar)
    if denom <= 0.0:
        return 0.0
    r = cross / denom
    if r < 0.0:
        return 0.0
    if r > 1.0:
        return 1.0
    return r


@numba.jit(parallel=True, **_JIT)
def ckf_columns(X, yr, tot, m):
    p = X.shape[1]
    out = np.empty(p)
    for j in prange(p):
        out[j] = ckf_single(np.ascontiguousarray(X[:, j]), yr, tot, m)
    return out


@numba.jit(parallel=True, **_JIT)
def binary_columns(X, yr, tot, m):
    p = X.shape[1]
    out = np.empty(p)
    for j in prange(p):
        out[j] = binary_single(np.ascontiguousarray(X[:, j]), yr, tot, m)
    return out


@numba.jit(parallel=True, **_JIT)
def slice_columns(X, labels, sizes):
    p = X.shape[1]
    out = np.empty(p)
    for j in prange(p):
        out[j] = slice_single(np.ascontiguousarray(X[:, j]), labels, sizes)
    return out


@numba.jit(parallel=True, **_JIT)
def dcor_columns(X, bc, bvar):
    p = X.shape[1]
    out = np.empty(p)
    for j in prange(p):
        out[j] = dcor_single(np.ascontiguousarray(X[:, j]), bc, bvar)
    return out


@numba.jit(parallel=True, **_JIT)
def ckf_pairs(X, Y):
    """CKF of column j of X against column j of Y."""
    p = X.shape[1]
    out = np.empty(p)
    for j in prange(p):
        yr, tot, m = dense_rank(np.ascontiguousarray(Y[:, j]))
        out[j] = ckf_single(np.ascontiguousarray(X[:, j]), yr, tot, m)
    return out


@numba.jit(parallel=True, **_JIT)
def binary_pairs(X, Y):
    p = X.shape[1]
    out = np.empty(p)
    for j in prange(p):
        yr, tot, m = dense_rank(np.ascontiguousarray(Y[:, j]))
        out[j] = binary_single(np.ascontiguousarray(X[:, j]), yr, tot, m)
    return out


@numba.jit(parallel=True, **_JIT)
def slice_pairs(X, Y, cut_idx):
    p = X.shape[1]
    out = np.empty(p)
    for j in prange(p):
        labels, sizes = slice_labels(np.ascontiguousarray(Y[:, j]), cut_idx)
        out[j] = slice_single(np.ascontiguousarray(X[:, j]), labels, sizes)
    return out
