"""Single-sample statistics: trimmed mean, Studentized statistic, plug-ins.

Every estimator consumes a sorted sample (sort once at ingestion, stable
sort) and a :class:`~trimedge.population.TrimSpec`.  The plug-in moments use
the three-block order-statistic weighting; for distinct-valued samples they
coincide with the moments of the explicitly Winsorized sample, which is the
brute-force oracle the tests check against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .population import TrimSpec


class DegenerateSampleError(ValueError):
    """All Winsorized values coincide; Studentization is impossible."""


class DegenerateDensityError(ValueError):
    """A kernel density estimate came out zero at a trimming quantile."""


@dataclass(frozen=True)
class PluginEstimates:
    t_n: float
    mu_hat_W: float
    s2_n: float
    f_hat_alpha: float
    f_hat_beta: float
    lambda1_hat: float
    lambda2_hat: float
    beta_n_hat: float
    delta: float
    warnings: tuple = field(default=())

    @property
    def degenerate(self) -> bool:
        return bool(self.warnings)


def ingest(values) -> np.ndarray:
    """Sort a raw sample once; ties keep input order (stable sort)."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] < 2:
        raise ValueError("sample must be a 1-D sequence of length >= 2")
    if not np.all(np.isfinite(arr)):
        raise ValueError("sample contains non-finite values")
    return np.sort(arr, kind="stable")


def trimmed_mean(sample: np.ndarray, spec: TrimSpec) -> float:
    """Average of the order statistics k..m."""
    k, m = spec.k, spec.m
    return float(kernels.batch_trimmed_mean(sample[None, :], k, m)[0])


def winsorize_sample(sample: np.ndarray, lower: float, upper: float) -> np.ndarray:
    """Clamp to [lower, upper]: values <= lower map to lower, > upper to upper."""
    if lower > upper:
        raise ValueError("lower must not exceed upper")
    return np.where(sample <= lower, lower, np.where(sample > upper, upper, sample))


def _moments(sample: np.ndarray, spec: TrimSpec):
    mu, s2, g3 = kernels.batch_plugin_moments(sample[None, :], spec.k, spec.m)
    return float(mu[0]), float(s2[0]), float(g3[0])


def plugin_mu_s2(sample: np.ndarray, spec: TrimSpec):
    mu, s2, _ = _moments(sample, spec)
    return mu, s2


def lambda1_hat(sample: np.ndarray, spec: TrimSpec) -> float:
    _, s2, g3 = _moments(sample, spec)
    if not s2 > 0.0:
        raise DegenerateSampleError("zero Winsorized variance")
    return g3 / s2**1.5


def kernel_density_at_quantile(sample: np.ndarray, r: int) -> float:
    """Step-kernel density estimate at X_{r:N} with fixed width N^{-1/4}."""
    n = sample.shape[0]
    if not 1 <= r <= n:
        raise ValueError("order index out of range")
    half = 0.5 * n**-0.25
    count = int(kernels.batch_density_counts(sample[None, :], r, half)[0])
    return count * n**-0.75


def plugin_lambda2_beta(
    sample: np.ndarray, spec: TrimSpec, printed_variant: bool = False
):
    """(lambda2_hat, beta_n_hat) from the plug-in and kernel-density estimates.

    By default the bias estimate mirrors the structure of the population bias
    term, using the density estimate at the upper quantile in the upper term.
    ``printed_variant=True`` uses the lower-quantile estimate in both density
    terms instead (kept for comparison).
    """
    n = sample.shape[0]
    alpha, beta = spec.alpha, spec.beta
    k, m = spec.k, spec.m
    t_n = trimmed_mean(sample, spec)
    mu, s2, _ = _moments(sample, spec)
    if not s2 > 0.0:
        raise DegenerateSampleError("zero Winsorized variance")
    f_a = kernel_density_at_quantile(sample, k)
    f_b = kernel_density_at_quantile(sample, m)
    if not (f_a > 0.0 and f_b > 0.0):
        raise DegenerateDensityError("density estimate degenerate at a quantile")
    xk, xm = float(sample[k - 1]), float(sample[m - 1])
    lam2 = (
        -(alpha**2) * (mu - xk) ** 2 / f_a
        + (1.0 - beta) ** 2 * (mu - xm) ** 2 / f_b
    ) / s2**1.5
    f_upper = f_a if printed_variant else f_b
    beta_hat = (
        -spec.frac_alpha * (t_n - xk)
        - 0.5 * alpha * (1.0 - alpha) / f_a
        + spec.frac_beta * (t_n - xm)
        + 0.5 * beta * (1.0 - beta) / f_upper
    ) / n
    return lam2, beta_hat


def studentized_statistic(sample: np.ndarray, spec: TrimSpec, mu0: float) -> float:
    """sqrt(N) (T_N - mu0) / ((beta-alpha)^{-1} S_N)."""
    n = sample.shape[0]
    t_n = trimmed_mean(sample, spec)
    _, s2 = plugin_mu_s2(sample, spec)
    if not s2 > 0.0:
        raise DegenerateSampleError("zero Winsorized variance")
    return math.sqrt(n) * (t_n - mu0) * (spec.beta - spec.alpha) / math.sqrt(s2)


def plugin_estimates(
    sample: np.ndarray, spec: TrimSpec, printed_variant: bool = False
) -> PluginEstimates:
    """Everything the empirical Edgeworth expansion needs from one sample.

    Degenerate cases are reported through the warnings field instead of
    raising: a zero density estimate zeroes lambda2_hat and the density part
    of beta_n_hat so downstream expansions degrade gracefully.
    """
    n = sample.shape[0]
    t_n = trimmed_mean(sample, spec)
    mu, s2, g3 = _moments(sample, spec)
    f_a = kernel_density_at_quantile(sample, spec.k)
    f_b = kernel_density_at_quantile(sample, spec.m)
    warnings = []
    if not s2 > 0.0:
        raise DegenerateSampleError("zero Winsorized variance")
    lam1 = g3 / s2**1.5
    try:
        lam2, beta_hat = plugin_lambda2_beta(sample, spec, printed_variant)
    except DegenerateDensityError:
        warnings.append("density estimate degenerate; expansion reduced to skewness term")
        lam2, beta_hat = 0.0, 0.0
    return PluginEstimates(
        t_n=t_n,
        mu_hat_W=mu,
        s2_n=s2,
        f_hat_alpha=f_a,
        f_hat_beta=f_b,
        lambda1_hat=lam1,
        lambda2_hat=lam2,
        beta_n_hat=beta_hat,
        delta=n**-0.25,
        warnings=tuple(warnings),
    )
