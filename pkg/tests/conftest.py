import numpy as np
import pytest


def brute_force_wcss(X: np.ndarray, k: int) -> float:
    """Exact optimum mean WCSS by exhausting all k^n assignments of n points
    to k labels (vectorized). Uses the identity
        sum_c sum_{i in c} |x_i - mean_c|^2 = sum_i |x_i|^2 - sum_c |S_c|^2/n_c
    so the whole enumeration is a handful of matrix products. Only viable for
    tiny n."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n, d = X.shape
    total = float((X * X).sum())
    codes = np.arange(k ** n, dtype=np.int64)
    labels = (codes[:, None] // (k ** np.arange(n, dtype=np.int64))) % k
    gain = np.zeros(codes.size)
    valid = np.ones(codes.size, dtype=bool)
    for c in range(k):
        mask = labels == c
        cnt = mask.sum(axis=1)
        valid &= cnt > 0  # empty clusters are dominated, skip them
        S = mask.astype(np.float64) @ X
        with np.errstate(divide="ignore", invalid="ignore"):
            gain += np.where(cnt > 0, (S * S).sum(axis=1) / np.maximum(cnt, 1), 0.0)
    if not valid.any():
        raise ValueError("k exceeds n")
    return float((total - gain[valid].max()) / n)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
