"""Pure-NumPy implementations of the hot per-sample kernels.

Same contract as the compiled extension in ``_kernels.pyx``; all inputs are
row-sorted 2-D float64 arrays and all order-statistic indices are 1-based.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def batch_trimmed_mean(s: np.ndarray, k: int, m: int) -> np.ndarray:
    """Row-wise average of order statistics k..m (inclusive)."""
    return s[:, k - 1 : m].mean(axis=1)


def batch_plugin_moments(s: np.ndarray, k: int, m: int):
    """Row-wise Winsorized plug-in moments (mu_hat_W, S_N^2, gamma3_hat_W).

    Boundary blocks get weights k/N and (N-m+1)/N; the middle block
    i = k+1 .. m-1 gets weight 1/N each and may be empty.
    """
    n = s.shape[1]
    xk = s[:, k - 1]
    xm = s[:, m - 1]
    core = s[:, k : m - 1] if m - 1 > k else s[:, :0]
    wk = k / n
    wm = (n - m + 1) / n
    mu = wk * xk + core.sum(axis=1) / n + wm * xm
    dk = xk - mu
    dm = xm - mu
    dc = core - mu[:, None]
    s2 = wk * dk**2 + (dc**2).sum(axis=1) / n + wm * dm**2
    g3 = wk * dk**3 + (dc**3).sum(axis=1) / n + wm * dm**3
    return mu, s2, g3


def batch_density_counts(s: np.ndarray, r: int, half_width: float) -> np.ndarray:
    """Row-wise count of points within half_width (inclusive) of X_{r:N}."""
    c = s[:, r - 1][:, None]
    return (np.abs(s - c) <= half_width).sum(axis=1).astype(np.int64)


def step_sup_distance(sorted_values: np.ndarray, target_values: np.ndarray) -> float:
    """Exact sup |ecdf - target| at the jump points of the empirical cdf.

    Compares the target to both the left and right limits of the step
    function, which is the exact Kolmogorov distance when the target is
    nondecreasing over the range of the values.
    """
    mm = sorted_values.shape[0]
    levels = np.arange(1, mm + 1) / mm
    hi = np.abs(levels - target_values).max()
    lo = np.abs(levels - 1.0 / mm - target_values).max()
    return float(max(hi, lo))
