"""Bootstrap test for uniqueness of the population k-means set.

H0 (uniqueness) is rejected when the standardized mean of the bootstrapped,
centered and sqrt(n)-scaled WCSS values falls below the alpha-quantile of a
standard normal: under non-uniqueness the limit variable has strictly
negative expectation, so the one-sided mean test is the powerful form.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .errors import InfeasibleError, ParameterError
from .kmeans import Dataset, FitOptions, fit
from .rng import RngStream, TAG_BOOT, TAG_FIT, as_stream

MAX_REDRAWS_PER_SAMPLE = 100


@dataclass(frozen=True)
class BootstrapDraws:
    t_star: np.ndarray  # B values sqrt(n) * (W*b - Wn)
    base_wcss: float
    n: int
    d: int
    B: int
    k: int
    redraws: int
    seed_label: int
    restarts: int
    base_fit_time: float
    wall_time: float


@dataclass(frozen=True)
class UniquenessReport:
    n: int
    d: int
    k: int
    B: int
    alpha: float
    base_wcss: float
    t_bar_star: float
    s_star: float
    threshold: float
    reject: bool
    degenerate: bool
    seed: int
    restarts: int
    redraws: int
    wall_time_s: float

    def to_json(self) -> dict:
        return {
            "n": self.n, "d": self.d, "k": self.k, "B": self.B,
            "alpha": self.alpha, "base_wcss": self.base_wcss,
            "t_bar_star": self.t_bar_star, "s_star": self.s_star,
            "threshold": self.threshold, "reject": self.reject,
            "degenerate": self.degenerate, "seed": self.seed,
            "restarts": self.restarts, "redraws": self.redraws,
            "wall_time_s": self.wall_time_s,
        }


def normal_quantile(alpha: float) -> float:
    """Inverse standard normal CDF."""
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha must be in (0, 1), got {alpha}")
    return float(ndtri(alpha))


def bootstrap_draws(data: Dataset, k: int, B: int, restarts: int,
                    rng_stream: RngStream | int, opts: FitOptions = FitOptions(),
                    warm_start: bool = True) -> BootstrapDraws:
    """Base fit on the original data, then B with-replacement resamples each
    refit with the same restart budget (plus, by default, one restart warm
    started from the base centers). Deterministic given rng_stream."""
    if B < 2:
        raise ParameterError(f"B must be >= 2, got {B}")
    t0 = time.perf_counter()
    stream = as_stream(rng_stream)
    X = data.values
    n = data.n

    base = fit(data, k, restarts, stream.child(TAG_FIT), opts)
    wn = base.wcss
    sqrt_n = math.sqrt(n)

    # map rows to distinct-row group ids once, so resample feasibility checks
    # are O(n) int work per draw
    _, group_id = np.unique(X, axis=0, return_inverse=True)

    boot_opts = FitOptions(
        max_iters=opts.max_iters, tol=opts.tol,
        warm_start=base.centers.centers if warm_start else None,
        bound_radius=opts.bound_radius,
        max_hartigan_passes=opts.max_hartigan_passes, max_cycles=opts.max_cycles)

    t_star = np.empty(B)
    redraws = 0
    for b in range(B):
        bstream = stream.child(TAG_BOOT, b)
        gen = bstream.child(0).generator()
        idx = gen.integers(0, n, size=n)
        attempts = 0
        while np.unique(group_id[idx]).size < k:
            attempts += 1
            redraws += 1
            if attempts > MAX_REDRAWS_PER_SAMPLE:
                raise InfeasibleError(
                    f"bootstrap sample {b} kept fewer than k={k} distinct rows "
                    f"after {MAX_REDRAWS_PER_SAMPLE} redraws")
            idx = gen.integers(0, n, size=n)
        boot = fit(Dataset(X[idx]), k, restarts, bstream.child(1), boot_opts)
        t_star[b] = sqrt_n * (boot.wcss - wn)

    return BootstrapDraws(
        t_star=t_star, base_wcss=wn, n=n, d=data.d, B=B, k=k,
        redraws=redraws, seed_label=stream.seed, restarts=restarts,
        base_fit_time=base.wall_time, wall_time=time.perf_counter() - t0)


def decide(draws: BootstrapDraws, alpha: float) -> UniquenessReport:
    """Standardized-mean decision: reject uniqueness iff the standardized
    bootstrap mean falls below the alpha normal quantile."""
    threshold = normal_quantile(alpha)
    t = draws.t_star
    s_star = float(t.std(ddof=1))
    if s_star == 0.0:
        # all draws equal: no evidence against uniqueness; flag the dataset
        return UniquenessReport(
            n=draws.n, d=draws.d, k=draws.k, B=draws.B, alpha=alpha,
            base_wcss=draws.base_wcss, t_bar_star=0.0, s_star=0.0,
            threshold=threshold, reject=False, degenerate=True,
            seed=draws.seed_label, restarts=draws.restarts,
            redraws=draws.redraws, wall_time_s=draws.wall_time)
    t_bar = math.fsum(t) / (s_star * math.sqrt(draws.B))
    return UniquenessReport(
        n=draws.n, d=draws.d, k=draws.k, B=draws.B, alpha=alpha,
        base_wcss=draws.base_wcss, t_bar_star=t_bar, s_star=s_star,
        threshold=threshold, reject=bool(t_bar < threshold), degenerate=False,
        seed=draws.seed_label, restarts=draws.restarts,
        redraws=draws.redraws, wall_time_s=draws.wall_time)
