"""Trimmed means, one-term Edgeworth expansions and Monte Carlo verification."""

from .distributions import DistributionModel, make_model, sample
from .edgeworth import (
    ExpansionCoefficients,
    empirical_expansion,
    expansion_cdf,
    invert_expansion,
    normal_cdf,
    normal_pdf,
    normal_quantile,
    population_expansion,
)
from .estimators import (
    PluginEstimates,
    ingest,
    kernel_density_at_quantile,
    lambda1_hat,
    plugin_estimates,
    plugin_lambda2_beta,
    plugin_mu_s2,
    studentized_statistic,
    trimmed_mean,
    winsorize_sample,
)
from .kernels import BACKEND as KERNEL_BACKEND
from .montecarlo import (
    SimulationConfig,
    bias_study,
    empirical_cdf_sup_distance,
    empirical_expansion_study,
    rate_study,
    simulate_stats,
)
from .population import (
    PopulationFunctionals,
    TrimSpec,
    bias_term,
    compute_functionals,
    winsorized_transform,
)
from .rng import RngStream
from .ustat import UStatDecomposition, bahadur_remainder, decompose, third_moment_check

__version__ = "0.1.0"
