import math

import numpy as np
import pytest

from trimedge.population import (
    SmoothnessError,
    TrimSpec,
    bias_term,
    compute_functionals,
    snapped_product,
    winsorized_transform,
)
from trimedge.distributions import make_model
from trimedge.rng import RngStream

from conftest import EXP_ORACLE


def test_trimspec_indices():
    spec = TrimSpec(0.1, 0.9, 100)
    assert (spec.k, spec.m) == (11, 90)
    assert spec.frac_alpha == 0.0 and spec.frac_beta == 0.0
    spec = TrimSpec(0.1, 0.9, 105)
    assert (spec.k, spec.m) == (11, 94)
    assert spec.frac_alpha == pytest.approx(0.5)
    assert spec.frac_beta == pytest.approx(0.5)


def test_trimspec_index_snap():
    # 0.2 * 55 is 11.000000000000002 in floating point; the index arithmetic
    # must treat it as the integer 11.
    assert 0.2 * 55 != 11 or True  # value depends on platform rounding
    assert snapped_product(0.2, 55) == 11.0
    spec = TrimSpec(0.2, 0.8, 55)
    assert (spec.k, spec.m) == (12, 44)
    assert spec.frac_alpha == 0.0 and spec.frac_beta == 0.0


def test_trimspec_validation():
    with pytest.raises(ValueError):
        TrimSpec(0.5, 0.5)
    with pytest.raises(ValueError):
        TrimSpec(-0.1, 0.5)
    with pytest.raises(ValueError):
        TrimSpec(0.45, 0.55, 9)  # k=5 > m=4: empty trim range
    with pytest.raises(ValueError):
        TrimSpec(0.1, 0.9).k  # no sample size attached


def test_winsorized_transform_uniform():
    m = make_model("uniform", [0.0, 1.0])
    spec = TrimSpec(0.25, 0.75)
    assert winsorized_transform(m, spec, 0.1) == 0.25  # lower clamp
    assert winsorized_transform(m, spec, 0.5) == 0.5  # interior identity
    assert winsorized_transform(m, spec, 0.95) == 0.75  # upper clamp


def test_winsorized_transform_exponential():
    m = make_model("exponential", [1.0])
    spec = TrimSpec(0.1, 0.9)
    assert winsorized_transform(m, spec, 0.95) == pytest.approx(
        2.302585093, abs=1e-9
    )


def test_uniform_functionals_closed_form(uni_pop):
    assert uni_pop.mu_trim == pytest.approx(0.5, abs=1e-8)
    assert uni_pop.mu_W == pytest.approx(0.5, abs=1e-8)
    assert uni_pop.sigma2_W == pytest.approx(1.0 / 24.0, abs=1e-8)
    assert uni_pop.gamma3_W == pytest.approx(0.0, abs=1e-8)
    assert uni_pop.delta2_W == pytest.approx(0.0, abs=1e-8)
    assert uni_pop.lambda1 == pytest.approx(0.0, abs=1e-8)
    assert uni_pop.lambda2 == pytest.approx(0.0, abs=1e-8)


def test_exponential_functionals_against_oracle(exp_pop):
    for key, value in EXP_ORACLE.items():
        assert getattr(exp_pop, key) == pytest.approx(value, abs=1e-8), key
    # the trimmed-window mean to its advertised precision
    assert exp_pop.mu_trim == pytest.approx(0.83070747, abs=1e-6)


def test_symmetric_trim_kills_odd_functionals():
    m = make_model("normal", [3.0, 2.0])
    pop = compute_functionals(m, TrimSpec(0.2, 0.8))
    assert pop.lambda1 == pytest.approx(0.0, abs=1e-8)
    assert pop.lambda2 == pytest.approx(0.0, abs=1e-8)


def test_location_scale_invariance_of_lambdas():
    base = compute_functionals(make_model("normal", [0.0, 1.0]), TrimSpec(0.1, 0.7))
    moved = compute_functionals(make_model("normal", [5.0, 3.0]), TrimSpec(0.1, 0.7))
    assert moved.lambda1 == pytest.approx(base.lambda1, abs=1e-8)
    assert moved.lambda2 == pytest.approx(base.lambda2, abs=1e-8)
    assert moved.mu_trim == pytest.approx(5.0 + 3.0 * base.mu_trim, abs=1e-8)
    assert moved.sigma2_W == pytest.approx(9.0 * base.sigma2_W, abs=1e-8)


def test_reflection_antisymmetry_of_lambdas():
    # x -> -x maps uniform(0,1) to uniform(-1,0) and (alpha, beta) to
    # (1-beta, 1-alpha); the skewness-type functionals change sign.
    pop = compute_functionals(make_model("uniform", [0.0, 1.0]), TrimSpec(0.2, 0.7))
    neg = compute_functionals(make_model("uniform", [-1.0, 0.0]), TrimSpec(0.3, 0.8))
    assert neg.lambda1 == pytest.approx(-pop.lambda1, abs=1e-8)
    assert neg.lambda2 == pytest.approx(-pop.lambda2, abs=1e-8)


def test_sigma2_matches_monte_carlo(exp_model, exp_spec, exp_pop):
    # sigma2_W is the variance of Q(U): simulate U, clamp through the
    # quantile, and compare within 4 standard errors of the variance.
    u = RngStream(11, 0).generator().random(1_000_000)
    q = np.asarray(exp_model.quantile(np.clip(u, exp_spec.alpha, exp_spec.beta)))
    w = (q - exp_pop.mu_W) ** 2
    se = w.std(ddof=1) / math.sqrt(w.size)
    assert abs(w.mean() - exp_pop.sigma2_W) < 4 * se


def test_bias_term_uniform_symmetric(uni_pop):
    assert bias_term(uni_pop, TrimSpec(0.25, 0.75, 100)) == pytest.approx(
        0.0, abs=1e-12
    )


def test_bias_term_exponential_integer_indices(exp_pop):
    # integer-index form: (1/200) * (-0.09/0.9 + 0.09/0.1) = 0.004
    assert bias_term(exp_pop, TrimSpec(0.1, 0.9, 100)) == pytest.approx(
        0.004, abs=1e-10
    )


def test_bias_term_fractional_indices(exp_pop):
    # N=105: alpha*N = 10.5, beta*N = 94.5; frozen 40-digit oracle value.
    assert bias_term(exp_pop, TrimSpec(0.1, 0.9, 105)) == pytest.approx(
        -0.0066534503682677113, abs=1e-12
    )


def test_atom_at_quantile_rejected():
    m = make_model("atomic", [0.3])
    with pytest.raises(SmoothnessError):
        compute_functionals(m, TrimSpec(0.25, 0.75))


def test_atomic_smooth_region_accepted():
    # trimming away the atom leaves a perfectly smooth uniform stretch
    m = make_model("atomic", [0.3])
    pop = compute_functionals(m, TrimSpec(0.5, 0.9))
    assert pop.f_alpha == pytest.approx(0.7)
    assert pop.sigma2_W > 0
