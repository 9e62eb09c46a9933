"""Set distances for consistency diagnostics.

Hausdorff distance between finite point clouds, Gromov-Hausdorff distance for
tiny clouds via exhaustive correspondence search, and the distance from a
fitted center set to a population catalog (minimized over orbit angles for
parametric entries).
"""

from __future__ import annotations

import math

import numpy as np

from . import backend
from .errors import ParameterError, ShapeError, UnsupportedError
from .kmeans import CenterSet, _as_matrix
from .models import PopulationCatalog

GH_MAX_POINTS = 4


def _clouds(a, b):
    A = a.centers if isinstance(a, CenterSet) else _as_matrix(a)
    B = b.centers if isinstance(b, CenterSet) else _as_matrix(b)
    if A.shape[1] != B.shape[1]:
        raise ShapeError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    return A, B


def hausdorff(a, b) -> float:
    """max of the two directed sup-inf distances; exhaustive O(|A||B|)."""
    A, B = _clouds(a, b)
    diff = A[:, None, :] - B[None, :, :]
    d = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def _pairwise(A):
    diff = A[:, None, :] - A[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def gromov_hausdorff_small(a, b) -> float:
    """Half the minimal correspondence distortion (the standard finite-space
    form of the embedding definition). Brute force over all surjective
    correspondences, so both sides are capped at 4 points."""
    A = a.centers if isinstance(a, CenterSet) else _as_matrix(a)
    B = b.centers if isinstance(b, CenterSet) else _as_matrix(b)
    if A.shape[0] > GH_MAX_POINTS or B.shape[0] > GH_MAX_POINTS:
        raise UnsupportedError(
            f"gromov_hausdorff_small supports at most {GH_MAX_POINTS} points per side")
    DA = np.ascontiguousarray(_pairwise(A))
    DB = np.ascontiguousarray(_pairwise(B))
    return 0.5 * float(backend.gh_min_distortion(DA, DB))


def orbit_distance(fit_centers, catalog: PopulationCatalog,
                   orbit_grid: int = 3600) -> tuple[float, int]:
    """Min Hausdorff distance from fit_centers to any catalog entry; orbits
    are discretized at orbit_grid equally spaced angles."""
    if not catalog.entries:
        raise ParameterError("catalog has no entries")
    if orbit_grid < 1:
        raise ParameterError("orbit_grid must be >= 1")
    F = fit_centers.centers if isinstance(fit_centers, CenterSet) else _as_matrix(fit_centers)
    best = math.inf
    best_idx = 0
    for idx, entry in enumerate(catalog.entries):
        if entry.centers is not None:
            d = hausdorff(F, entry.centers)
        else:
            orbit = np.stack([entry.orbit(2.0 * math.pi * t / orbit_grid)
                              for t in range(orbit_grid)])  # (grid, k, dim)
            if orbit.shape[2] != F.shape[1]:
                raise ShapeError(
                    f"dimension mismatch: {F.shape[1]} vs {orbit.shape[2]}")
            diff = F[None, :, None, :] - orbit[:, None, :, :]
            dm = np.sqrt(np.einsum("gfkd,gfkd->gfk", diff, diff))
            dh = np.maximum(dm.min(axis=2).max(axis=1), dm.min(axis=1).max(axis=1))
            d = float(dh.min())
        if d < best:
            best = d
            best_idx = idx
    return best, best_idx
