import math

import numpy as np
import pytest

from kmeans_uniq.errors import NumericError, ParameterError, UnsupportedError
from kmeans_uniq.limit_law import (MinimizerCovariance, estimate_covariance,
                                   simulate_T)
from kmeans_uniq.models import ModelSpec, population_catalog
from kmeans_uniq.rng import RngStream


def _cov(sigma):
    return MinimizerCovariance(sigma=np.asarray(sigma, float), mc_n=2, seed=0)


def test_covariance_validation():
    with pytest.raises(ParameterError):
        _cov(np.zeros((2, 3)))
    with pytest.raises(NumericError):
        _cov([[1.0, 0.5], [0.4, 1.0]])       # asymmetric
    with pytest.raises(NumericError):
        _cov([[1.0, 2.0], [2.0, 1.0]])       # indefinite


def test_single_gaussian_moments():
    s = simulate_T(_cov([[1.0]]), 1_000_000, RngStream(1))
    band = 4.0 / math.sqrt(s.n_sim)
    assert abs(s.mean) <= band
    assert abs(s.sd - 1.0) <= band * 2
    assert abs(s.skewness) <= band * 4


def test_independent_pair_reproduces_minus_inv_sqrt_pi():
    s = simulate_T(_cov(np.eye(2)), 1_000_000, RngStream(2))
    assert abs(s.mean - (-1.0 / math.sqrt(math.pi))) <= 4 * s.sd / math.sqrt(s.n_sim)


def test_duplicated_minimizer_behaves_as_single():
    s = simulate_T(_cov([[1.0, 1.0], [1.0, 1.0]]), 500_000, RngStream(3))
    band = 4 * s.sd / math.sqrt(s.n_sim)
    assert abs(s.mean) <= band
    assert abs(s.sd - 1.0) <= 0.01


def test_simulate_deterministic_and_samples():
    a = simulate_T(_cov(np.eye(2)), 10_000, RngStream(4), return_samples=True)
    b = simulate_T(_cov(np.eye(2)), 10_000, RngStream(4), return_samples=True)
    assert np.array_equal(a.samples, b.samples)
    assert a.mean == b.mean
    assert a.samples.shape == (10_000,)


def test_simulate_blocked_equals_unblocked():
    cov = _cov([[2.0, 0.3], [0.3, 1.0]])
    a = simulate_T(cov, 30_000, RngStream(5), block=1000)
    b = simulate_T(cov, 30_000, RngStream(5), block=10 ** 9)
    assert a.mean == pytest.approx(b.mean, rel=1e-12)
    assert a.sd == pytest.approx(b.sd, rel=1e-12)


def test_estimate_covariance_unique_catalog():
    spec = ModelSpec("C2k2-2")
    cat = population_catalog(spec)
    cov = estimate_covariance(spec, cat, 50_000, RngStream(6))
    assert cov.sigma.shape == (1, 1)
    assert cov.sigma[0, 0] > 0


def test_estimate_covariance_dnu_symmetry():
    spec = ModelSpec("UrC3k2", r=0.1)
    cat = population_catalog(spec)
    cov = estimate_covariance(spec, cat, 400_000, RngStream(7))
    assert cov.sigma.shape == (2, 2)
    v1, v2 = cov.sigma[0, 0], cov.sigma[1, 1]
    # mirror symmetry of the density: equal variances up to MC error
    se = (v1 + v2) / math.sqrt(cov.mc_n)
    assert abs(v1 - v2) <= 5 * se
    assert not cov.approximate_orbit


def test_estimate_covariance_orbit_requires_discretization():
    spec = ModelSpec("C1k2")
    cat = population_catalog(spec)
    with pytest.raises(UnsupportedError):
        estimate_covariance(spec, cat, 1000, RngStream(8))
    cov = estimate_covariance(spec, cat, 1000, RngStream(8), orbit_discretization=8)
    assert cov.approximate_orbit
    assert cov.sigma.shape == (8, 8)


@pytest.mark.slow
def test_estimate_covariance_tc3k2_rotational_symmetry():
    spec = ModelSpec("TC3k2")
    cat = population_catalog(spec)
    cov = estimate_covariance(spec, cat, 400_000, RngStream(9))
    assert cov.sigma.shape == (3, 3)
    diag = np.diag(cov.sigma)
    off = np.array([cov.sigma[0, 1], cov.sigma[0, 2], cov.sigma[1, 2]])
    # band covers MC error plus the ~1e-3 oracle noise in the catalog centers
    assert diag.max() - diag.min() <= 0.15 * diag.mean()
    assert off.max() - off.min() <= 0.15 * np.abs(off).mean()


def test_dnu_limit_mean_strictly_negative():
    spec = ModelSpec("UrC3k2", r=0.1)
    cat = population_catalog(spec)
    cov = estimate_covariance(spec, cat, 200_000, RngStream(10))
    s = simulate_T(cov, 200_000, RngStream(11))
    assert s.mean + 4 * s.sd / math.sqrt(s.n_sim) < 0


def test_parameter_errors():
    with pytest.raises(ParameterError):
        simulate_T(_cov([[1.0]]), 1, RngStream(1))
    spec = ModelSpec("C2k2-2")
    cat = population_catalog(spec)
    with pytest.raises(ParameterError):
        estimate_covariance(spec, cat, 1, RngStream(1))
