"""Pure-numpy backend for the hot kernels.

Reference implementation; the numba backend in ``_kernels_numba`` mirrors the
same semantics (assignment ties to the lowest center index, compensated WCSS
accumulation over rows in order, deterministic empty-cluster repair).
"""

from __future__ import annotations

import math

import numpy as np

BACKEND_NAME = "numpy"

# chunk rows so the (chunk, k, d) distance tensor stays small
_CHUNK = 8192


def min_sqdist(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    n = X.shape[0]
    out = np.empty(n)
    for lo in range(0, n, _CHUNK):
        hi = min(lo + _CHUNK, n)
        diff = X[lo:hi, None, :] - C[None, :, :]
        out[lo:hi] = np.einsum("ijk,ijk->ij", diff, diff).min(axis=1)
    return out


def assign(X: np.ndarray, C: np.ndarray):
    n = X.shape[0]
    labels = np.empty(n, np.int64)
    best = np.empty(n)
    for lo in range(0, n, _CHUNK):
        hi = min(lo + _CHUNK, n)
        diff = X[lo:hi, None, :] - C[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        labels[lo:hi] = d2.argmin(axis=1)
        best[lo:hi] = d2[np.arange(hi - lo), labels[lo:hi]]
    return labels, math.fsum(best) / n


def _repair_empty(X, labels, sums, counts, best):
    # move the point farthest from its center into each empty cluster
    k = counts.shape[0]
    for i in range(k):
        if counts[i] == 0:
            movable = counts[labels] > 1
            cand = np.where(movable, best, -np.inf)
            j = int(np.argmax(cand))
            c_old = labels[j]
            counts[c_old] -= 1
            counts[i] += 1
            sums[c_old] -= X[j]
            sums[i] += X[j]
            labels[j] = i
            best[j] = 0.0


def lloyd(X: np.ndarray, C: np.ndarray, max_iter: int, tol: float):
    n, d = X.shape
    k = C.shape[0]
    C = C.copy()
    prev = np.inf
    it = 0
    converged = False
    labels = np.zeros(n, np.int64)
    while it < max_iter:
        it += 1
        labels = np.empty(n, np.int64)
        best = np.empty(n)
        for lo in range(0, n, _CHUNK):
            hi = min(lo + _CHUNK, n)
            diff = X[lo:hi, None, :] - C[None, :, :]
            d2 = np.einsum("ijk,ijk->ij", diff, diff)
            labels[lo:hi] = d2.argmin(axis=1)
            best[lo:hi] = d2[np.arange(hi - lo), labels[lo:hi]]
        w = math.fsum(best) / n
        counts = np.bincount(labels, minlength=k)
        sums = np.zeros((k, d))
        np.add.at(sums, labels, X)
        if np.any(counts == 0):
            _repair_empty(X, labels, sums, counts, best)
        C = sums / counts[:, None]
        if w == 0.0 or (prev < np.inf and prev - w <= tol * prev):
            converged = True
            break
        prev = w
    labels, w = assign(X, C)
    return C, labels, w, it, converged


def hartigan(X: np.ndarray, C: np.ndarray, labels: np.ndarray, max_passes: int):
    n, d = X.shape
    k = C.shape[0]
    labels = labels.copy()
    counts = np.bincount(labels, minlength=k).astype(np.int64)
    sums = np.zeros((k, d))
    np.add.at(sums, labels, X)
    C = sums / np.maximum(counts, 1)[:, None]
    moves = 0
    for _ in range(max_passes):
        moved = False
        for j in range(n):
            c = labels[j]
            nc = counts[c]
            if nc <= 1:
                continue
            x = X[j]
            dc = x - C[c]
            down = (dc @ dc) * nc / (nc - 1)
            diff = x - C
            up = np.einsum("ij,ij->i", diff, diff) * counts / (counts + 1.0)
            up[c] = np.inf
            bi = int(np.argmin(up))
            if up[bi] - down < -1e-12 * down:
                counts[c] -= 1
                counts[bi] += 1
                sums[c] -= x
                sums[bi] += x
                C[c] = sums[c] / counts[c]
                C[bi] = sums[bi] / counts[bi]
                labels[j] = bi
                moved = True
                moves += 1
        if not moved:
            break
    return C, labels, moves


def gh_min_distortion(DA: np.ndarray, DB: np.ndarray) -> float:
    """Min over surjective correspondences R of max_{(p,q),(p',q') in R}
    |DA[p,p'] - DB[q,q']|.  Brute force; sizes must be tiny."""
    m, mb = DA.shape[0], DB.shape[0]
    npairs = m * mb
    D = np.abs(DA[:, None, :, None] - DB[None, :, None, :]).reshape(npairs, npairs)
    rowbit = np.array([1 << (p // mb) for p in range(npairs)])
    colbit = np.array([1 << (p % mb) for p in range(npairs)])
    full_r = (1 << m) - 1
    full_c = (1 << mb) - 1
    best = np.inf
    for mask in range(1, 1 << npairs):
        idx = [p for p in range(npairs) if mask >> p & 1]
        r = c = 0
        for p in idx:
            r |= rowbit[p]
            c |= colbit[p]
        if r != full_r or c != full_c:
            continue
        val = D[np.ix_(idx, idx)].max()
        if val < best:
            best = val
    return float(best)
