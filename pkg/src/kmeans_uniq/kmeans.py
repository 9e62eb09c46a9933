"""Empirical k-means engine.

Multi-start local search for the empirical objective (mean of squared
distances to the nearest center): k-means++ seeding, Lloyd iterations to
convergence, then Hartigan-Wong single-point-move passes, alternated until
neither step improves. The restart with minimal WCSS wins, ties broken by
earliest restart index, so results are deterministic given a stream.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import InfeasibleError, ParameterError, ShapeError
from .rng import RngStream, as_stream


def _as_matrix(values) -> np.ndarray:
    arr = np.ascontiguousarray(values, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"expected a non-empty n x d matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ShapeError("data contains non-finite entries")
    return arr


@dataclass(frozen=True)
class Dataset:
    """n observations in d dimensions."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _as_matrix(self.values))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    @classmethod
    def from_csv(cls, path, header: bool | None = None) -> "Dataset":
        """Load a numeric CSV. header=None sniffs the first line."""
        with open(path) as fh:
            first = fh.readline()
        if header is None:
            try:
                [float(tok) for tok in first.strip().split(",") if tok]
                header = False
            except ValueError:
                header = True
        arr = np.loadtxt(path, delimiter=",", skiprows=1 if header else 0, ndmin=2)
        return cls(arr)

    def to_csv(self, path, header: bool = True) -> None:
        cols = ",".join(f"x{i + 1}" for i in range(self.d))
        np.savetxt(path, self.values, delimiter=",", fmt="%.17g",
                   header=cols if header else "", comments="")


def canonical_order(centers: np.ndarray) -> np.ndarray:
    """Lexicographic order by coordinates (first coordinate first)."""
    return np.lexsort(centers.T[::-1])


@dataclass(frozen=True)
class CenterSet:
    """Unordered set of k distinct centers, stored in canonical order."""

    centers: np.ndarray

    def __post_init__(self):
        arr = _as_matrix(self.centers)
        arr = arr[canonical_order(arr)]
        k = arr.shape[0]
        for i in range(k - 1):
            if np.array_equal(arr[i], arr[i + 1]):
                raise ParameterError("centers must be pairwise distinct")
        object.__setattr__(self, "centers", arr)

    @property
    def k(self) -> int:
        return self.centers.shape[0]

    @property
    def d(self) -> int:
        return self.centers.shape[1]


@dataclass(frozen=True)
class FitOptions:
    max_iters: int = 300
    tol: float = 1e-10
    # optional warm start: these centers seed one extra restart (index 0)
    warm_start: np.ndarray | None = None
    # optional clamp of centers onto the ball of this radius (off by default;
    # the reference experiments impose no bound)
    bound_radius: float | None = None
    max_hartigan_passes: int = 100
    max_cycles: int = 50


@dataclass(frozen=True)
class KMeansFit:
    centers: CenterSet
    assignments: np.ndarray
    wcss: float
    restarts_used: int
    iterations: int
    converged: bool
    wall_time: float


def objective(data: Dataset, centers) -> float:
    """Mean of min squared distances; summation order fixed over rows."""
    X = data.values
    C = centers.centers if isinstance(centers, CenterSet) else _as_matrix(centers)
    if C.shape[1] != X.shape[1]:
        raise ShapeError(f"dimension mismatch: data d={X.shape[1]}, centers d={C.shape[1]}")
    _, w = backend.assign(X, C)
    return float(w)


def kmeanspp_init(X: np.ndarray, k: int, gen: np.random.Generator) -> np.ndarray:
    """k-means++ seeding; raises InfeasibleError when fewer than k distinct rows."""
    n = X.shape[0]
    C = np.empty((k, X.shape[1]))
    C[0] = X[int(gen.integers(n))]
    d2 = backend.min_sqdist(X, C[:1])
    for i in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            raise InfeasibleError(f"fewer than k={k} distinct rows in data")
        idx = int(gen.choice(n, p=d2 / total))
        C[i] = X[idx]
        d2 = np.minimum(d2, backend.min_sqdist(X, C[i : i + 1]))
    return C


def _refine(X, C0, opts: FitOptions):
    """Lloyd to convergence, then Hartigan passes, alternated to a joint fixed point."""
    C, labels, w, iters, conv = backend.lloyd(X, C0, opts.max_iters, opts.tol)
    if opts.bound_radius is not None:
        C = _clamp(C, opts.bound_radius)
        labels, w = backend.assign(X, C)
    for _ in range(opts.max_cycles):
        C2, labels2, moves = backend.hartigan(X, C, labels, opts.max_hartigan_passes)
        if moves == 0:
            break
        C, labels, w, it2, conv = backend.lloyd(X, C2, opts.max_iters, opts.tol)
        iters += it2
        if opts.bound_radius is not None:
            C = _clamp(C, opts.bound_radius)
            labels, w = backend.assign(X, C)
    return C, labels, w, iters, conv


def _clamp(C, radius):
    C = C.copy()
    norms = np.sqrt((C * C).sum(axis=1))
    over = norms > radius
    if np.any(over):
        C[over] *= (radius / norms[over])[:, None]
    return C


def fit(data: Dataset, k: int, restarts: int, rng_stream: RngStream | int,
        opts: FitOptions = FitOptions()) -> KMeansFit:
    """Best fit over independent k-means++ restarts (plus one optional
    warm-started restart). Deterministic given rng_stream."""
    t0 = time.perf_counter()
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    if restarts < 1:
        raise ParameterError(f"restarts must be >= 1, got {restarts}")
    X = data.values
    if k > X.shape[0]:
        raise InfeasibleError(f"k={k} exceeds n={X.shape[0]}")
    stream = as_stream(rng_stream)

    inits = []
    if opts.warm_start is not None:
        W = _as_matrix(opts.warm_start)
        if W.shape != (k, X.shape[1]):
            raise ShapeError("warm_start centers have wrong shape")
        inits.append(W)
    best = None
    for r in range(restarts):
        gen = stream.child(r).generator()
        C0 = kmeanspp_init(X, k, gen)
        inits.append(C0)
    # warm start (if any) occupies restart index 0, so ties prefer it
    for idx, C0 in enumerate(inits):
        C, labels, w, iters, conv = _refine(X, np.ascontiguousarray(C0), opts)
        if best is None or w < best[0]:
            best = (w, idx, C, labels, iters, conv)
    w, _, C, labels, iters, conv = best

    order = canonical_order(C)
    C = C[order]
    remap = np.empty(k, np.int64)
    remap[order] = np.arange(k)
    labels = remap[labels]
    # degenerate duplicate centers can only arise when distinct rows < k
    for i in range(k - 1):
        if np.array_equal(C[i], C[i + 1]):
            raise InfeasibleError(f"fewer than k={k} distinct rows in data")
    return KMeansFit(
        centers=CenterSet(C),
        assignments=labels,
        wcss=float(w),
        restarts_used=len(inits),
        iterations=int(iters),
        converged=bool(conv),
        wall_time=time.perf_counter() - t0,
    )


def wcss(data: Dataset, k: int, restarts: int, rng_stream: RngStream | int,
         opts: FitOptions = FitOptions()) -> float:
    return fit(data, k, restarts, rng_stream, opts).wcss
