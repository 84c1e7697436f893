"""Replication engine: simulate the trimmed-mean dfs and measure sup distances.

Replicate r of a size-n study always draws from the substream keyed by
(base_seed, n-block | r), so any worker count and any execution order yield
identical results, and adding sample sizes to a study never perturbs the
sizes already run.  Sup distances against continuous targets are computed
exactly at the jump points of the empirical cdf; raw expansion targets are
additionally probed at the stationary points of the expansion, which is
where a jump-point-only scan could miss the supremum.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import kernels
from .distributions import make_model
from .edgeworth import (
    ExpansionCoefficients,
    correction_polynomial,
    expansion_cdf,
    normal_cdf,
    normal_pdf,
    population_expansion,
)
from .population import TrimSpec, bias_term, compute_functionals
from .rng import RngStream, replicate_stream_index

KINDS = ("normalized", "studentized")
TARGETS = ("normal", "population_expansion", "empirical_expansion")

#: Default replicate counts: df estimation / remainder-quantile studies.
DEFAULT_DF_REPS = 200_000
DEFAULT_QUANTILE_REPS = 10_000
MIN_SUP_REPS = 1_000


@dataclass(frozen=True)
class SimulationConfig:
    family: str
    params: tuple
    alpha: float
    beta: float
    n_list: tuple
    reps: int
    base_seed: int
    kind: str = "studentized"
    targets: tuple = ("normal", "population_expansion")
    workers: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        unknown = set(self.targets) - set(TARGETS)
        if unknown:
            raise ValueError(f"unknown targets {sorted(unknown)}")
        if self.reps < MIN_SUP_REPS:
            raise ValueError(f"reps must be >= {MIN_SUP_REPS} for sup-distance claims")
        for n in self.n_list:
            TrimSpec(self.alpha, self.beta, int(n))  # validates k <= m
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass
class SupDistanceRow:
    n: int
    kind: str
    target: str
    sup_distance: float
    mc_standard_error: float
    sqrtn_scaled: float
    reps: int
    base_seed: int
    runtime_s: float
    raw_exits_unit_interval: bool = False

    # runtime_s is kept in memory only; written artifacts must be
    # byte-identical across reruns and worker counts.
    COLUMNS = (
        "n",
        "kind",
        "target",
        "sup_distance",
        "mc_standard_error",
        "sqrtn_scaled",
        "reps",
        "base_seed",
        "raw_exits_unit_interval",
    )

    def as_csv_row(self) -> str:
        return ",".join(
            [
                str(self.n),
                self.kind,
                self.target,
                f"{self.sup_distance:.17g}",
                f"{self.mc_standard_error:.17g}",
                f"{self.sqrtn_scaled:.17g}",
                str(self.reps),
                str(self.base_seed),
                str(int(self.raw_exits_unit_interval)),
            ]
        )


@dataclass
class SupDistanceReport:
    rows: list = field(default_factory=list)

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(",".join(SupDistanceRow.COLUMNS) + "\n")
            for row in self.rows:
                fh.write(row.as_csv_row() + "\n")


def _simulate_block(
    family: str,
    params: tuple,
    alpha: float,
    beta: float,
    n: int,
    base_seed: int,
    start: int,
    stop: int,
    want_plugins: bool,
    printed_variant: bool = False,
) -> dict:
    """Per-replicate statistics for replicate indices [start, stop)."""
    model = make_model(family, params)
    spec = TrimSpec(alpha, beta, n)
    k, m = spec.k, spec.m
    block = stop - start
    mat = np.empty((block, n), dtype=np.float64)
    for i, r in enumerate(range(start, stop)):
        stream = RngStream(base_seed, replicate_stream_index(n, r))
        mat[i] = stream.generator().random(n)
    mat = np.ascontiguousarray(np.sort(model.quantile(mat), axis=1))

    t_n = kernels.batch_trimmed_mean(mat, k, m)
    mu, s2, g3 = kernels.batch_plugin_moments(mat, k, m)
    out = {"t_n": t_n, "mu_hat": mu, "s2": s2}
    if want_plugins:
        half = 0.5 * n**-0.25
        f_a = kernels.batch_density_counts(mat, k, half) * n**-0.75
        f_b = kernels.batch_density_counts(mat, m, half) * n**-0.75
        degenerate = (f_a <= 0.0) | (f_b <= 0.0)
        f_a_safe = np.where(degenerate, 1.0, f_a)
        f_b_safe = np.where(degenerate, 1.0, f_b)
        xk = mat[:, k - 1]
        xm = mat[:, m - 1]
        s3 = s2**1.5
        lam1 = g3 / s3
        lam2 = (
            -(alpha**2) * (mu - xk) ** 2 / f_a_safe
            + (1.0 - beta) ** 2 * (mu - xm) ** 2 / f_b_safe
        ) / s3
        f_upper = f_a_safe if printed_variant else f_b_safe
        beta_hat = (
            -spec.frac_alpha * (t_n - xk)
            - 0.5 * alpha * (1.0 - alpha) / f_a_safe
            + spec.frac_beta * (t_n - xm)
            + 0.5 * beta * (1.0 - beta) / f_upper
        ) / n
        lam2 = np.where(degenerate, 0.0, lam2)
        beta_hat = np.where(degenerate, 0.0, beta_hat)
        out.update(
            {
                "f_hat_alpha": f_a,
                "f_hat_beta": f_b,
                "lambda1_hat": lam1,
                "lambda2_hat": lam2,
                "beta_n_hat": beta_hat,
                "degenerate": degenerate,
            }
        )
    if start == 0:
        out["first_sample"] = mat[0].copy()
    return out


def simulate_stats(
    family: str,
    params: Sequence[float],
    alpha: float,
    beta: float,
    n: int,
    reps: int,
    base_seed: int,
    workers: int = 1,
    want_plugins: bool = False,
    printed_variant: bool = False,
) -> dict:
    """Per-replicate statistic arrays, assembled in replicate order."""
    params = tuple(float(p) for p in params)
    block = max(256, min(4096, reps))
    bounds = list(range(0, reps, block)) + [reps]
    tasks = [
        (family, params, alpha, beta, n, base_seed, lo, hi, want_plugins, printed_variant)
        for lo, hi in zip(bounds[:-1], bounds[1:])
    ]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_simulate_block_star, tasks))
    else:
        results = [_simulate_block(*t) for t in tasks]
    merged: dict = {}
    for key in results[0]:
        if key == "first_sample":
            merged[key] = results[0][key]
        else:
            merged[key] = np.concatenate([r[key] for r in results])
    merged["n"] = n
    merged["reps"] = reps
    return merged


def _simulate_block_star(args):
    return _simulate_block(*args)


def statistic_values(stats: dict, spec: TrimSpec, kind: str, mu0: float, sigma_w: float | None) -> np.ndarray:
    """Normalized or Studentized statistic values from simulated stats."""
    n = stats["n"]
    scale = spec.beta - spec.alpha
    centered = math.sqrt(n) * (stats["t_n"] - mu0) * scale
    if kind == "normalized":
        if sigma_w is None:
            raise ValueError("normalized statistic needs sigma_W")
        return centered / sigma_w
    return centered / np.sqrt(stats["s2"])


def empirical_cdf_sup_distance(
    values: np.ndarray,
    target: Callable[[np.ndarray], np.ndarray],
    extra_points: Optional[np.ndarray] = None,
) -> float:
    """sup_x |ecdf(x) - target(x)|, exact at the ecdf jump points.

    ``extra_points`` adds evaluation sites (both ecdf limits) for targets
    that are not monotone, e.g. raw Edgeworth expansions.
    """
    xs = np.sort(np.asarray(values, dtype=np.float64))
    if xs.size == 0:
        raise ValueError("values must be nonempty")
    d = kernels.step_sup_distance(xs, np.asarray(target(xs), dtype=np.float64))
    if extra_points is not None and len(extra_points) > 0:
        pts = np.asarray(extra_points, dtype=np.float64)
        t = np.asarray(target(pts), dtype=np.float64)
        right = np.searchsorted(xs, pts, side="right") / xs.size
        left = np.searchsorted(xs, pts, side="left") / xs.size
        d = max(d, float(np.abs(right - t).max()), float(np.abs(left - t).max()))
    return d


def expansion_stationary_points(c: ExpansionCoefficients) -> np.ndarray:
    """Real stationary points of the raw expansion (closed-form cubic roots)."""
    sign, p = correction_polynomial(c)
    # d/dx [Phi + s*phi*P/(6 sqrt N)] = phi * [1 + s*(P' - x P)/(6 sqrt N)]
    c0, c2 = p[0], p[2]
    # ascending coefficients of 6 sqrt(N) + s (P'(x) - x P(x)); constant first
    poly = np.array(
        [6.0 * math.sqrt(c.n), sign * (2.0 * c2 - c0), 0.0, -sign * c2]
    )
    if abs(poly[3]) < 1e-300:
        return np.empty(0)
    roots = np.polynomial.polynomial.polyroots(poly)
    real = roots[np.abs(roots.imag) < 1e-9].real
    return real[(real > -30.0) & (real < 30.0)]


def expansion_exits_unit_interval(c: ExpansionCoefficients, xs: np.ndarray) -> bool:
    pts = np.concatenate([xs, expansion_stationary_points(c)])
    vals = expansion_cdf(c, pts)
    return bool((vals < 0.0).any() or (vals > 1.0).any())


def sup_distance_with_se(
    values: np.ndarray,
    target: Callable[[np.ndarray], np.ndarray],
    extra_points: Optional[np.ndarray] = None,
    n_batches: int = 20,
) -> tuple:
    """(sup distance on all replicates, SE from consecutive-batch splitting)."""
    d = empirical_cdf_sup_distance(values, target, extra_points)
    m = len(values)
    batch = m // n_batches
    if batch >= 2:
        sups = [
            empirical_cdf_sup_distance(values[i * batch : (i + 1) * batch], target, extra_points)
            for i in range(n_batches)
        ]
        se = float(np.std(sups, ddof=1)) / math.sqrt(n_batches)
    else:
        se = float("nan")
    return d, se


def rate_study(config: SimulationConfig) -> SupDistanceReport:
    """Sup distances to the normal cdf and the population expansion per size."""
    model = make_model(config.family, config.params)
    spec0 = TrimSpec(config.alpha, config.beta)
    pop = compute_functionals(model, spec0)
    report = SupDistanceReport()
    for n in config.n_list:
        n = int(n)
        t0 = time.perf_counter()
        spec = spec0.with_n(n)
        stats = simulate_stats(
            config.family,
            config.params,
            config.alpha,
            config.beta,
            n,
            config.reps,
            config.base_seed,
            workers=config.workers,
        )
        values = statistic_values(stats, spec, config.kind, pop.mu_trim, pop.sigma_W)
        runtime = time.perf_counter() - t0
        for target_name in config.targets:
            if target_name == "normal":
                target, extra, exits = normal_cdf, None, False
            elif target_name == "population_expansion":
                coeffs = population_expansion(pop, spec, config.kind)
                target = lambda x, c=coeffs: expansion_cdf(c, x)
                extra = expansion_stationary_points(coeffs)
                exits = expansion_exits_unit_interval(coeffs, np.sort(values))
            else:
                raise ValueError(
                    "empirical_expansion targets go through empirical_expansion_study"
                )
            d, se = sup_distance_with_se(values, target, extra)
            report.rows.append(
                SupDistanceRow(
                    n=n,
                    kind=config.kind,
                    target=target_name,
                    sup_distance=d,
                    mc_standard_error=se,
                    sqrtn_scaled=d * math.sqrt(n),
                    reps=config.reps,
                    base_seed=config.base_seed,
                    runtime_s=runtime,
                    raw_exits_unit_interval=exits,
                )
            )
    return report


def bias_study(
    family: str,
    params: Sequence[float],
    alpha: float,
    beta: float,
    n: int,
    reps: int,
    base_seed: int,
    workers: int = 1,
) -> dict:
    """Monte Carlo estimate of (beta-alpha)(E T_N - mu(alpha,beta)) vs beta_N."""
    if reps < 100_000:
        raise ValueError("reps must be >= 10^5 for the bias study")
    model = make_model(family, params)
    spec = TrimSpec(alpha, beta, n)
    pop = compute_functionals(model, spec)
    stats = simulate_stats(family, params, alpha, beta, n, reps, base_seed, workers)
    scale = beta - alpha
    mc_bias = scale * (float(stats["t_n"].mean()) - pop.mu_trim)
    se = scale * float(stats["t_n"].std(ddof=1)) / math.sqrt(reps)
    return {
        "n": n,
        "reps": reps,
        "mc_bias": mc_bias,
        "mc_se": se,
        "beta_n": bias_term(pop, spec),
    }


def empirical_expansion_study(config: SimulationConfig, inner_reps: int = 200) -> list:
    """Distribution over replicates of sup |ecdf - empirical expansion|.

    Each of the first ``inner_reps`` replicates contributes the sup distance
    between the full empirical df and the expansion built from that
    replicate's own plug-ins.  Returns one report dict per sample size with
    median and mean summaries (the limit statement does not pick one) plus
    the population-expansion reference distance.
    """
    model = make_model(config.family, config.params)
    spec0 = TrimSpec(config.alpha, config.beta)
    pop = compute_functionals(model, spec0)
    reports = []
    for n in config.n_list:
        n = int(n)
        t0 = time.perf_counter()
        spec = spec0.with_n(n)
        stats = simulate_stats(
            config.family,
            config.params,
            config.alpha,
            config.beta,
            n,
            config.reps,
            config.base_seed,
            workers=config.workers,
            want_plugins=True,
        )
        values = statistic_values(stats, spec, config.kind, pop.mu_trim, pop.sigma_W)
        xs = np.sort(values)
        phi_xs = normal_pdf(xs)
        cdf_xs = normal_cdf(xs)
        scale = 6.0 * math.sqrt(n)
        mm = xs.size
        levels_hi = np.arange(1, mm + 1) / mm
        levels_lo = np.arange(0, mm) / mm

        def sup_against(coeffs: ExpansionCoefficients) -> float:
            sign, p = correction_polynomial(coeffs)
            vals = cdf_xs + sign * phi_xs * (p[0] + p[2] * xs * xs) / scale
            d = max(
                float(np.abs(levels_hi - vals).max()),
                float(np.abs(levels_lo - vals).max()),
            )
            extra = expansion_stationary_points(coeffs)
            if extra.size:
                t = expansion_cdf(coeffs, extra)
                right = np.searchsorted(xs, extra, side="right") / mm
                left = np.searchsorted(xs, extra, side="left") / mm
                d = max(d, float(np.abs(right - t).max()), float(np.abs(left - t).max()))
            return d

        pop_coeffs = population_expansion(pop, spec, config.kind)
        pop_sup = sup_against(pop_coeffs)
        inner = min(inner_reps, config.reps)
        sups = np.empty(inner)
        for r in range(inner):
            coeffs = ExpansionCoefficients(
                lambda1=float(stats["lambda1_hat"][r]),
                lambda2=float(stats["lambda2_hat"][r]),
                bias_over_sigma=n
                * float(stats["beta_n_hat"][r])
                / math.sqrt(float(stats["s2"][r])),
                n=n,
                kind=config.kind,
                source="empirical",
                degenerate=bool(stats["degenerate"][r]),
            )
            sups[r] = sup_against(coeffs)
        reports.append(
            {
                "n": n,
                "reps": config.reps,
                "inner_reps": inner,
                "kind": config.kind,
                "median_sup": float(np.median(sups)),
                "mean_sup": float(sups.mean()),
                "p95_sup": float(np.quantile(sups, 0.95)),
                "population_sup": pop_sup,
                "degenerate_fraction": float(stats["degenerate"].mean()),
                "runtime_s": time.perf_counter() - t0,
            }
        )
    return reports
