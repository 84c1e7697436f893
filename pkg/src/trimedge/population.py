"""Population-side functionals of a trimming scheme.

Everything the expansion formulas need about the true distribution: the
trimming quantiles and density values, the population trimmed mean, the
Winsorized moments, the skewness/interaction coefficients lambda1/lambda2
and the finite-sample bias term.  Closed forms are not assumed; integrals
run through adaptive quadrature on the quantile scale, split at the
trimming fractions where the Winsorized transform kinks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from scipy.integrate import quad

from .distributions import DensityUndefinedError, DistributionModel

#: Snap tolerance for alpha*N landing within float noise of an integer.
INDEX_SNAP_TOL = 1e-9


class SmoothnessError(ValueError):
    """The model violates the positive-density condition at a trimming quantile."""


class QuadratureError(RuntimeError):
    pass


def snapped_product(fraction: float, n: int) -> float:
    """fraction*n with values within INDEX_SNAP_TOL of an integer snapped to it."""
    x = fraction * n
    r = round(x)
    return float(r) if abs(x - r) < INDEX_SNAP_TOL else x


@dataclass(frozen=True)
class TrimSpec:
    """Trimming fractions plus the derived order-statistic indices."""

    alpha: float
    beta: float
    n: Optional[int] = None

    def __post_init__(self):
        if not 0.0 < self.alpha < self.beta < 1.0:
            raise ValueError("need 0 < alpha < beta < 1")
        if self.n is not None:
            if self.n < 2:
                raise ValueError("sample size must be >= 2")
            if self.k > self.m:
                raise ValueError(
                    f"empty trim range: k={self.k} > m={self.m} for n={self.n}"
                )

    @property
    def k(self) -> int:
        # k = floor(alpha*N) + 1
        return int(math.floor(snapped_product(self.alpha, self._n))) + 1

    @property
    def m(self) -> int:
        # m = floor(beta*N)
        return int(math.floor(snapped_product(self.beta, self._n)))

    @property
    def frac_alpha(self) -> float:
        x = snapped_product(self.alpha, self._n)
        return x - math.floor(x)

    @property
    def frac_beta(self) -> float:
        x = snapped_product(self.beta, self._n)
        return x - math.floor(x)

    @property
    def _n(self) -> int:
        if self.n is None:
            raise ValueError("this TrimSpec carries no sample size")
        return self.n

    def with_n(self, n: int) -> "TrimSpec":
        return TrimSpec(self.alpha, self.beta, n)


@dataclass(frozen=True)
class PopulationFunctionals:
    xi_alpha: float
    xi_beta: float
    f_alpha: float
    f_beta: float
    mu_trim: float
    mu_W: float
    sigma2_W: float
    gamma3_W: float
    delta2_W: float
    lambda1: float
    lambda2: float
    quad_tol: float

    @property
    def sigma_W(self) -> float:
        return math.sqrt(self.sigma2_W)


def winsorized_transform(model: DistributionModel, spec: TrimSpec, u: float) -> float:
    """Q(u): the quantile function clamped to the trimming window (alpha, beta]."""
    if u <= spec.alpha:
        return float(model.quantile(spec.alpha))
    if u <= spec.beta:
        return float(model.quantile(u))
    return float(model.quantile(spec.beta))


def _density_at(model: DistributionModel, xi: float, which: str) -> float:
    try:
        f = model.density(xi)
    except DensityUndefinedError as exc:
        raise SmoothnessError(f"density undefined at xi_{which}={xi!r}") from exc
    if not (f > 0.0 and math.isfinite(f)):
        raise SmoothnessError(f"density not positive and finite at xi_{which}={xi!r}")
    return float(f)


def _quad(fn, a, b, tol, points=None):
    val, err = quad(fn, a, b, epsabs=tol, epsrel=tol, limit=200, points=points)
    if err > 10 * max(tol, abs(val) * tol):
        raise QuadratureError(f"quadrature did not converge on [{a}, {b}] (err={err})")
    return val


def compute_functionals(
    model: DistributionModel, spec: TrimSpec, quad_tol: float = 1e-10
) -> PopulationFunctionals:
    """All population functionals of (model, alpha, beta).

    Raises SmoothnessError when the density is undefined or nonpositive at a
    trimming quantile (the expansion hypotheses fail there).
    """
    alpha, beta = spec.alpha, spec.beta
    # Quantiles come straight from the model's left-continuous inverse,
    # never from root-finding on the cdf.
    xi_a = float(model.quantile(alpha))
    xi_b = float(model.quantile(beta))
    f_a = _density_at(model, xi_a, "alpha")
    f_b = _density_at(model, xi_b, "beta")

    qf = lambda u: float(model.quantile(u))
    trim_integral = _quad(qf, alpha, beta, quad_tol)
    mu_trim = trim_integral / (beta - alpha)
    mu_w = alpha * xi_a + trim_integral + (1.0 - beta) * xi_b

    def central(r):
        mid = _quad(lambda u: (qf(u) - mu_w) ** r, alpha, beta, quad_tol)
        return alpha * (xi_a - mu_w) ** r + mid + (1.0 - beta) * (xi_b - mu_w) ** r

    sigma2_w = central(2)
    gamma3_w = central(3)
    if not sigma2_w > 0.0:
        raise SmoothnessError("degenerate Winsorized variance (xi_alpha == xi_beta?)")

    delta2_w = (
        -(alpha**2) * (mu_w - xi_a) ** 2 / f_a
        + (1.0 - beta) ** 2 * (mu_w - xi_b) ** 2 / f_b
    )
    sigma3 = sigma2_w**1.5
    return PopulationFunctionals(
        xi_alpha=xi_a,
        xi_beta=xi_b,
        f_alpha=f_a,
        f_beta=f_b,
        mu_trim=mu_trim,
        mu_W=mu_w,
        sigma2_W=sigma2_w,
        gamma3_W=gamma3_w,
        delta2_W=delta2_w,
        lambda1=gamma3_w / sigma3,
        lambda2=delta2_w / sigma3,
        quad_tol=quad_tol,
    )


def bias_term(pop: PopulationFunctionals, spec: TrimSpec) -> float:
    """Finite-sample bias coefficient beta_N of the trimmed mean.

    Uses the exact fractional parts of alpha*N and beta*N (snapped against
    float noise), so integer-index cases reduce to the simple two-term form.
    """
    n = spec._n
    alpha, beta = spec.alpha, spec.beta
    fa, fb = spec.frac_alpha, spec.frac_beta
    return (
        -fa * (pop.mu_trim - pop.xi_alpha)
        - 0.5 * alpha * (1.0 - alpha) / pop.f_alpha
        + fb * (pop.mu_trim - pop.xi_beta)
        + 0.5 * beta * (1.0 - beta) / pop.f_beta
    ) / n
