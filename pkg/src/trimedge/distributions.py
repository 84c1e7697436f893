"""Catalog of ground-truth distributions with exact cdf/quantile/density.

All quantiles follow the left-continuous inverse convention
F^{-1}(u) = inf{x : F(x) >= u}.  Sampling is inverse-transform only, driven
by an :class:`~trimedge.rng.RngStream`, which makes every simulation exactly
reproducible regardless of how replicates are scheduled.

The "atomic" entry carries a point mass and deliberately violates the local
smoothness needed by the expansion theory; its density reports "undefined"
at the atom instead of a number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import ndtr, ndtri

from .rng import RngStream


class UnknownFamilyError(ValueError):
    pass


class InvalidParamsError(ValueError):
    pass


class DensityUndefinedError(ValueError):
    """Raised when the density does not exist at the requested point."""


@dataclass(frozen=True)
class DistributionModel:
    name: str
    params: tuple
    cdf: Callable[[np.ndarray], np.ndarray]
    quantile: Callable[[np.ndarray], np.ndarray]
    density: Callable[[float], float]
    smooth: bool = True
    atoms: tuple = field(default=())

    def sample(self, n: int, stream: RngStream) -> np.ndarray:
        return sample(self, n, stream)


def _uniform(a: float, b: float) -> DistributionModel:
    if not b > a:
        raise InvalidParamsError("uniform requires b > a")
    w = b - a

    def density(x):
        return 1.0 / w if a <= x <= b else 0.0

    return DistributionModel(
        name="uniform",
        params=(a, b),
        cdf=lambda x: np.clip((np.asarray(x, float) - a) / w, 0.0, 1.0),
        quantile=lambda u: a + w * np.asarray(u, float),
        density=density,
    )


def _exponential(rate: float) -> DistributionModel:
    if not rate > 0:
        raise InvalidParamsError("exponential requires a positive rate")

    def cdf(x):
        x = np.asarray(x, float)
        return np.where(x <= 0, 0.0, -np.expm1(-rate * x))

    def density(x):
        return rate * math.exp(-rate * x) if x >= 0 else 0.0

    return DistributionModel(
        name="exponential",
        params=(rate,),
        cdf=cdf,
        quantile=lambda u: -np.log1p(-np.asarray(u, float)) / rate,
        density=density,
    )


def _normal(mu: float, sigma: float) -> DistributionModel:
    if not sigma > 0:
        raise InvalidParamsError("normal requires a positive scale")
    c = 1.0 / (sigma * math.sqrt(2.0 * math.pi))
    return DistributionModel(
        name="normal",
        params=(mu, sigma),
        cdf=lambda x: ndtr((np.asarray(x, float) - mu) / sigma),
        quantile=lambda u: mu + sigma * ndtri(np.asarray(u, float)),
        density=lambda x: c * math.exp(-0.5 * ((x - mu) / sigma) ** 2),
    )


def _cauchy(loc: float, scale: float) -> DistributionModel:
    if not scale > 0:
        raise InvalidParamsError("cauchy requires a positive scale")
    return DistributionModel(
        name="cauchy",
        params=(loc, scale),
        cdf=lambda x: 0.5 + np.arctan((np.asarray(x, float) - loc) / scale) / np.pi,
        quantile=lambda u: loc + scale * np.tan(np.pi * (np.asarray(u, float) - 0.5)),
        density=lambda x: scale / (math.pi * (scale**2 + (x - loc) ** 2)),
    )


def _atomic(p: float) -> DistributionModel:
    # Point mass p at 0 plus (1-p) * uniform(0, 1): F has a jump at 0, so the
    # quantile is flat on (0, p] and the density is undefined at the atom.
    if not 0 < p < 1:
        raise InvalidParamsError("atomic requires an atom mass in (0, 1)")

    def cdf(x):
        x = np.asarray(x, float)
        return np.where(x < 0, 0.0, np.clip(p + (1 - p) * x, p, 1.0))

    def quantile(u):
        u = np.asarray(u, float)
        return np.where(u <= p, 0.0, (u - p) / (1 - p))

    def density(x):
        if x == 0.0:
            raise DensityUndefinedError("density undefined at the atom x=0")
        return 1 - p if 0 < x <= 1 else 0.0

    return DistributionModel(
        name="atomic",
        params=(p,),
        cdf=cdf,
        quantile=quantile,
        density=density,
        smooth=False,
        atoms=(0.0,),
    )


_CATALOG = {
    "uniform": (_uniform, 2),
    "exponential": (_exponential, 1),
    "normal": (_normal, 2),
    "cauchy": (_cauchy, 2),
    "atomic": (_atomic, 1),
}


def make_model(name: str, params: Sequence[float]) -> DistributionModel:
    if name not in _CATALOG:
        raise UnknownFamilyError(
            f"unknown family {name!r}; choose from {sorted(_CATALOG)}"
        )
    builder, nparams = _CATALOG[name]
    params = tuple(float(p) for p in params)
    if len(params) != nparams:
        raise InvalidParamsError(f"{name} takes {nparams} parameter(s), got {len(params)}")
    return builder(*params)


def sample(model: DistributionModel, n: int, stream: RngStream) -> np.ndarray:
    """n i.i.d. variates by inverse transform; deterministic given the stream."""
    if n < 1:
        raise ValueError("n must be >= 1")
    u = stream.generator().random(n)
    return np.asarray(model.quantile(u), float)
