"""Numba backend for the hot kernels (same semantics as ``_kernels_numpy``)."""

from __future__ import annotations

import numpy as np
from numba import njit

BACKEND_NAME = "numba"


@njit(cache=True, nogil=True)
def min_sqdist(X, C):
    n, d = X.shape
    k = C.shape[0]
    out = np.empty(n)
    for j in range(n):
        best = np.inf
        for i in range(k):
            dist = 0.0
            for t in range(d):
                diff = X[j, t] - C[i, t]
                dist += diff * diff
            if dist < best:
                best = dist
        out[j] = best
    return out


@njit(cache=True, nogil=True)
def assign(X, C):
    n, d = X.shape
    k = C.shape[0]
    labels = np.empty(n, np.int64)
    s = 0.0
    comp = 0.0
    for j in range(n):
        best = np.inf
        bi = 0
        for i in range(k):
            dist = 0.0
            for t in range(d):
                diff = X[j, t] - C[i, t]
                dist += diff * diff
            if dist < best:
                best = dist
                bi = i
        labels[j] = bi
        # Kahan-compensated left-to-right sum
        y = best - comp
        tt = s + y
        comp = (tt - s) - y
        s = tt
    return labels, s / n


@njit(cache=True, nogil=True)
def lloyd(X, C0, max_iter, tol):
    n, d = X.shape
    k = C0.shape[0]
    C = C0.copy()
    prev = np.inf
    it = 0
    converged = False
    labels = np.zeros(n, np.int64)
    best = np.zeros(n)
    while it < max_iter:
        it += 1
        sums = np.zeros((k, d))
        counts = np.zeros(k, np.int64)
        s = 0.0
        comp = 0.0
        for j in range(n):
            bd = np.inf
            bi = 0
            for i in range(k):
                dist = 0.0
                for t in range(d):
                    diff = X[j, t] - C[i, t]
                    dist += diff * diff
                if dist < bd:
                    bd = dist
                    bi = i
            labels[j] = bi
            best[j] = bd
            counts[bi] += 1
            for t in range(d):
                sums[bi, t] += X[j, t]
            y = bd - comp
            tt = s + y
            comp = (tt - s) - y
            s = tt
        w = s / n
        for i in range(k):
            if counts[i] == 0:
                # move the point farthest from its center into the empty cluster
                jmax = -1
                dmax = -1.0
                for j in range(n):
                    if counts[labels[j]] > 1 and best[j] > dmax:
                        dmax = best[j]
                        jmax = j
                c_old = labels[jmax]
                counts[c_old] -= 1
                counts[i] += 1
                for t in range(d):
                    sums[c_old, t] -= X[jmax, t]
                    sums[i, t] += X[jmax, t]
                labels[jmax] = i
                best[jmax] = 0.0
        for i in range(k):
            for t in range(d):
                C[i, t] = sums[i, t] / counts[i]
        if w == 0.0 or (prev < np.inf and prev - w <= tol * prev):
            converged = True
            break
        prev = w
    labels, w = assign(X, C)
    return C, labels, w, it, converged


@njit(cache=True, nogil=True)
def hartigan(X, C0, labels0, max_passes):
    n, d = X.shape
    k = C0.shape[0]
    labels = labels0.copy()
    counts = np.zeros(k, np.int64)
    sums = np.zeros((k, d))
    for j in range(n):
        c = labels[j]
        counts[c] += 1
        for t in range(d):
            sums[c, t] += X[j, t]
    C = np.empty((k, d))
    for i in range(k):
        m = counts[i] if counts[i] > 0 else 1
        for t in range(d):
            C[i, t] = sums[i, t] / m
    moves = 0
    for _ in range(max_passes):
        moved = False
        for j in range(n):
            c = labels[j]
            nc = counts[c]
            if nc <= 1:
                continue
            down = 0.0
            for t in range(d):
                diff = X[j, t] - C[c, t]
                down += diff * diff
            down *= nc / (nc - 1.0)
            best_up = np.inf
            bi = -1
            for i in range(k):
                if i == c:
                    continue
                up = 0.0
                for t in range(d):
                    diff = X[j, t] - C[i, t]
                    up += diff * diff
                up *= counts[i] / (counts[i] + 1.0)
                if up < best_up:
                    best_up = up
                    bi = i
            if bi >= 0 and best_up - down < -1e-12 * down:
                counts[c] -= 1
                counts[bi] += 1
                for t in range(d):
                    sums[c, t] -= X[j, t]
                    sums[bi, t] += X[j, t]
                    C[c, t] = sums[c, t] / counts[c]
                    C[bi, t] = sums[bi, t] / counts[bi]
                labels[j] = bi
                moved = True
                moves += 1
        if not moved:
            break
    return C, labels, moves


@njit(cache=True, nogil=True)
def gh_min_distortion(DA, DB):
    m = DA.shape[0]
    mb = DB.shape[0]
    npairs = m * mb
    D = np.empty((npairs, npairs))
    for p in range(npairs):
        for q in range(npairs):
            D[p, q] = abs(DA[p // mb, q // mb] - DB[p % mb, q % mb])
    full_r = (1 << m) - 1
    full_c = (1 << mb) - 1
    best = np.inf
    for mask in range(1, 1 << npairs):
        r = 0
        c = 0
        mm = mask
        p = 0
        while mm:
            if mm & 1:
                r |= 1 << (p // mb)
                c |= 1 << (p % mb)
            mm >>= 1
            p += 1
        if r != full_r or c != full_c:
            continue
        val = 0.0
        ok = True
        for p in range(npairs):
            if not (mask >> p) & 1:
                continue
            for q in range(p, npairs):
                if not (mask >> q) & 1:
                    continue
                if D[p, q] > val:
                    val = D[p, q]
                    if val >= best:
                        ok = False
                        break
            if not ok:
                break
        if ok and val < best:
            best = val
    return best
