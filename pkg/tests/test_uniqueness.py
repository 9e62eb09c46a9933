import json
import math

import numpy as np
import pytest

from kmeans_uniq.errors import ParameterError
from kmeans_uniq.kmeans import Dataset
from kmeans_uniq.models import ModelSpec, sample
from kmeans_uniq.rng import RngStream
from kmeans_uniq.uniqueness import (BootstrapDraws, bootstrap_draws, decide,
                                    normal_quantile)

REPORT_FIELDS = {"n", "d", "k", "B", "alpha", "base_wcss", "t_bar_star",
                 "s_star", "threshold", "reject", "degenerate", "seed",
                 "restarts", "redraws", "wall_time_s"}


def _synthetic_draws(t_star, n=100, B=None):
    t = np.asarray(t_star, dtype=float)
    return BootstrapDraws(t_star=t, base_wcss=1.0, n=n, d=1,
                          B=B or t.size, k=2, redraws=0, seed_label=0,
                          restarts=20, base_fit_time=0.0, wall_time=0.0)


def test_normal_quantile_values():
    assert normal_quantile(0.5) == 0.0
    assert normal_quantile(0.05) == pytest.approx(-1.6448536269514722, abs=1e-10)
    assert normal_quantile(0.975) == pytest.approx(1.959963984540054, abs=1e-10)
    with pytest.raises(ParameterError):
        normal_quantile(0.0)
    with pytest.raises(ParameterError):
        normal_quantile(1.0)


def test_decide_degenerate_all_zero():
    rep = decide(_synthetic_draws(np.zeros(50)), 0.05)
    assert rep.degenerate
    assert not rep.reject
    assert rep.s_star == 0.0


def test_decide_strong_negative_mean():
    gen = np.random.default_rng(0)
    t = gen.normal(-0.5, 1.0, 1000)
    rep = decide(_synthetic_draws(t), 0.05)
    # t_bar ~ -0.5 * sqrt(1000) ~ -15.8
    assert rep.t_bar_star == pytest.approx(-0.5 * math.sqrt(1000), abs=2.5)
    assert rep.reject


def test_decide_calibration_under_null():
    # synthetic N(0,1) draws: t_bar_star is asymptotically N(0,1), so the
    # rejection frequency over repeated synthetic runs is ~alpha
    gen = np.random.default_rng(1)
    alpha = 0.05
    runs = 2000
    rejections = sum(
        decide(_synthetic_draws(gen.standard_normal(1000)), alpha).reject
        for _ in range(runs))
    rate = rejections / runs
    se = math.sqrt(alpha * (1 - alpha) / runs)
    assert abs(rate - alpha) < 4 * se + 0.005


def test_decide_report_schema_fields():
    rep = decide(_synthetic_draws(np.random.default_rng(2).standard_normal(100)), 0.1)
    js = rep.to_json()
    assert set(js) == REPORT_FIELDS
    json.dumps(js)  # serializable


def test_bootstrap_rejects_small_B():
    data = Dataset(np.random.default_rng(3).standard_normal((30, 1)))
    with pytest.raises(ParameterError):
        bootstrap_draws(data, 2, 1, 3, RngStream(1))


def test_bootstrap_deterministic():
    data = Dataset(np.random.default_rng(4).standard_normal((60, 2)))
    a = bootstrap_draws(data, 2, 10, 3, RngStream(5))
    b = bootstrap_draws(data, 2, 10, 3, RngStream(5))
    assert np.array_equal(a.t_star, b.t_star)
    assert a.base_wcss == b.base_wcss


def test_bootstrap_degenerate_single_point_k1():
    data = Dataset(np.full((40, 1), 3.0))
    draws = bootstrap_draws(data, 1, 10, 2, RngStream(6))
    assert np.all(draws.t_star == 0.0)
    rep = decide(draws, 0.05)
    assert rep.degenerate and not rep.reject


def test_bootstrap_redraws_counted_on_sparse_support():
    # two distinct values, k=2: resamples occasionally miss one value
    X = np.concatenate([np.zeros(4), np.ones(2)])[:, None]
    draws = bootstrap_draws(Dataset(X), 2, 50, 2, RngStream(7))
    assert draws.redraws >= 0  # executed; every accepted sample has 2 groups
    assert np.all(np.isfinite(draws.t_star))


def test_bootstrap_warm_start_never_hurts():
    data = Dataset(np.random.default_rng(8).standard_normal((200, 2)))
    warm = bootstrap_draws(data, 3, 20, 2, RngStream(9), warm_start=True)
    cold = bootstrap_draws(data, 3, 20, 2, RngStream(9), warm_start=False)
    # same resample indices, warm adds one candidate start per draw
    assert np.all(warm.t_star <= cold.t_star + 1e-9)


def test_translation_invariance_of_draws():
    gen = np.random.default_rng(10)
    X = gen.standard_normal((120, 2))
    shift = np.array([3.7, -1.2])
    a = bootstrap_draws(Dataset(X), 2, 30, 5, RngStream(11))
    b = bootstrap_draws(Dataset(X + shift), 2, 30, 5, RngStream(11))
    assert np.allclose(a.t_star, b.t_star, atol=1e-6)
    ra, rb = decide(a, 0.05), decide(b, 0.05)
    assert ra.reject == rb.reject


def test_scale_invariance_of_decision():
    gen = np.random.default_rng(12)
    X = gen.standard_normal((120, 2))
    lam = 2.0
    a = bootstrap_draws(Dataset(X), 2, 30, 5, RngStream(13))
    b = bootstrap_draws(Dataset(lam * X), 2, 30, 5, RngStream(13))
    assert np.array_equal(lam * lam * a.t_star, b.t_star)
    assert decide(a, 0.05).reject == decide(b, 0.05).reject
    assert decide(a, 0.05).t_bar_star == pytest.approx(
        decide(b, 0.05).t_bar_star, rel=1e-12)


@pytest.mark.slow
def test_nonunique_model_mean_strictly_negative():
    data = sample(ModelSpec("C1k2"), 10_000, RngStream(14).child(1))
    draws = bootstrap_draws(data, 2, 200, 20, RngStream(14).child(2))
    t = draws.t_star
    se = t.std(ddof=1) / math.sqrt(t.size)
    assert t.mean() < -3 * se


@pytest.mark.slow
def test_unique_model_mean_near_zero():
    data = sample(ModelSpec("C2k2-2"), 100_000, RngStream(15).child(1))
    draws = bootstrap_draws(data, 2, 200, 20, RngStream(15).child(2))
    t = draws.t_star
    se = t.std(ddof=1) / math.sqrt(t.size)
    assert abs(t.mean()) <= 3 * se + 0.05
