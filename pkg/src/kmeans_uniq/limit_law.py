"""Simulator of the limiting WCSS variable.

The sqrt(n)-scaled, centered empirical WCSS converges to the infimum of a
zero-mean Gaussian process over the set of population minimizers. For a
finite minimizer catalog that infimum is the min of a multivariate normal
whose covariance is Cov(f_j(X), f_l(X)) for the min-squared-distance
functions f_j of the catalog entries. Uniqueness is equivalent to that limit
being a zero-mean normal; with several genuinely distinct minimizers the
mean is strictly negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import NumericError, ParameterError, UnsupportedError
from .models import ModelSpec, PopulationCatalog, sample
from .rng import RngStream, as_stream

PSD_TOL = 1e-8


@dataclass(frozen=True)
class MinimizerCovariance:
    sigma: np.ndarray  # (m, m)
    mc_n: int
    seed: int
    approximate_orbit: bool = False

    @property
    def m(self) -> int:
        return self.sigma.shape[0]

    def __post_init__(self):
        s = np.asarray(self.sigma, dtype=np.float64)
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise ParameterError("sigma must be square")
        if not np.allclose(s, s.T, atol=1e-12):
            raise NumericError("sigma is not symmetric")
        eig = np.linalg.eigvalsh(s)
        if eig.min() < -PSD_TOL * max(1.0, eig.max()):
            raise NumericError(f"sigma not PSD: min eigenvalue {eig.min():g}")
        object.__setattr__(self, "sigma", s)


@dataclass(frozen=True)
class LimitSummary:
    mean: float
    sd: float
    skewness: float
    n_sim: int
    samples: np.ndarray | None = None

    def to_json(self) -> dict:
        return {"mean": self.mean, "sd": self.sd, "skewness": self.skewness,
                "n_sim": self.n_sim}


def estimate_covariance(spec: ModelSpec, catalog: PopulationCatalog, mc_n: int,
                        rng_stream: RngStream | int,
                        orbit_discretization: int | None = None) -> MinimizerCovariance:
    """Empirical covariance of the entry objective values f_j(X) over mc_n
    fresh draws. Orbit entries need an explicit finite discretization and the
    result is flagged approximate."""
    if mc_n < 2:
        raise ParameterError("mc_n must be >= 2")
    entry_centers = []
    approx = False
    for entry in catalog.entries:
        if entry.centers is not None:
            entry_centers.append(entry.centers)
        else:
            if orbit_discretization is None:
                raise UnsupportedError(
                    "catalog has orbit entries; pass orbit_discretization")
            approx = True
            for t in range(orbit_discretization):
                entry_centers.append(entry.orbit(2.0 * math.pi * t / orbit_discretization))
    stream = as_stream(rng_stream)
    X = sample(spec, mc_n, stream).values
    F = np.empty((len(entry_centers), mc_n))
    for j, C in enumerate(entry_centers):
        F[j] = backend.min_sqdist(X, np.ascontiguousarray(C))
    sigma = np.cov(F, ddof=1)
    sigma = np.atleast_2d(sigma)
    return MinimizerCovariance(sigma=sigma, mc_n=mc_n, seed=stream.seed,
                               approximate_orbit=approx)


def simulate_T(cov: MinimizerCovariance, n_sim: int, rng_stream: RngStream | int,
               return_samples: bool = False, block: int = 262144) -> LimitSummary:
    """Draw n_sim vectors from N(0, sigma) via symmetric eigendecomposition
    (negative eigenvalues within tolerance clipped to zero) and summarize the
    min coordinate of each draw."""
    if n_sim < 2:
        raise ParameterError("n_sim must be >= 2")
    sigma = cov.sigma
    vals, vecs = np.linalg.eigh(sigma)
    scale = max(1.0, float(vals.max(initial=0.0)))
    if vals.min() < -PSD_TOL * scale:
        raise NumericError(f"covariance not PSD: min eigenvalue {vals.min():g}")
    L = vecs * np.sqrt(np.clip(vals, 0.0, None))
    gen = as_stream(rng_stream).generator()
    m = cov.m
    out = np.empty(n_sim) if return_samples else None
    # streaming raw moments in blocks
    s1 = s2 = s3 = 0.0
    done = 0
    while done < n_sim:
        nb = min(block, n_sim - done)
        z = gen.standard_normal((nb, m))
        t = (z @ L.T).min(axis=1)
        if out is not None:
            out[done:done + nb] = t
        s1 += float(t.sum())
        s2 += float((t * t).sum())
        s3 += float((t ** 3).sum())
        done += nb
    mean = s1 / n_sim
    var = max((s2 - n_sim * mean * mean) / (n_sim - 1), 0.0)
    sd = math.sqrt(var)
    if sd > 0:
        m3 = s3 / n_sim - 3 * mean * (s2 / n_sim) + 2 * mean ** 3
        skew = m3 / (s2 / n_sim - mean * mean) ** 1.5
    else:
        skew = 0.0
    return LimitSummary(mean=mean, sd=sd, skewness=skew, n_sim=n_sim, samples=out)
