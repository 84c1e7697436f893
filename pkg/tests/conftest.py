import pytest

from trimedge import TrimSpec, compute_functionals, make_model

# Frozen oracle values for exponential(1) with alpha=0.1, beta=0.9, computed
# independently at 40-digit precision from the closed-form antiderivative
# (1-u)ln(1-u) + u of the quantile and exact integration of the Winsorized
# central moments on the x-scale.
EXP_ORACLE = {
    "xi_alpha": 0.10536051565782630,
    "xi_beta": 2.3025850929940457,
    "f_alpha": 0.9,
    "f_beta": 0.1,
    "mu_trim": 0.83070744349079888,
    "mu_W": 0.90536051565782630,
    "sigma2_W": 0.52055508453275612,
    "gamma3_W": 0.27199429774455530,
    "delta2_W": 0.18811254084012658,
    "lambda1": 0.72420206709365851,
    "lambda2": 0.50086156971791504,
}


@pytest.fixture(scope="session")
def exp_model():
    return make_model("exponential", [1.0])


@pytest.fixture(scope="session")
def exp_spec():
    return TrimSpec(0.1, 0.9)


@pytest.fixture(scope="session")
def exp_pop(exp_model, exp_spec):
    return compute_functionals(exp_model, exp_spec)


@pytest.fixture(scope="session")
def uni_model():
    return make_model("uniform", [0.0, 1.0])


@pytest.fixture(scope="session")
def uni_spec():
    return TrimSpec(0.25, 0.75)


@pytest.fixture(scope="session")
def uni_pop(uni_model, uni_spec):
    return compute_functionals(uni_model, uni_spec)
