"""Exact information measures between order statistics.

Continuous samples reduce to uniform order statistics, for which every
pairwise and subset mutual information is a short combination of the
sequence ``T_k = log k! - k H_k``.  Discrete samples are handled through
binomial and trinomial tail sums.  Independent oracles (quadrature,
enumeration, Monte Carlo) cross-check the closed forms.
"""

from .asymptotics import (
    NAMED_CASES,
    AsymptoticCase,
    ConvergenceRow,
    convergence_table,
    decoupling_rate,
    fit_gap_slope,
    limit_fixed_pair,
    limit_k_step,
    limit_k_step_bracket,
    limit_quantile_pair,
    limit_quantile_vs_max,
    limit_r_vs_max,
    named_case,
    scaled_mi,
)
from .continuous import (
    IndexSet,
    MIResult,
    beta_log_expectation,
    covariance_exponential_min2,
    covariance_uniform,
    joint_pdf_uniform,
    kl_min_max,
    kl_subset,
    kl_whole_sequence,
    log_normalizer,
    mi_pair,
    mi_subsets,
)
from .discrete import (
    BoundCheck,
    DiscreteDist,
    JointPMF2,
    binomial_tail,
    check_upper_bound,
    joint_pmf,
    mi_bernoulli,
    mi_discrete_exact,
    mi_min_max_bernoulli,
)
from .errors import ConsistencyError, DomainError, OracleError
from .oracles import (
    OracleReport,
    RNGSpec,
    enum_mi_discrete,
    mc_covariance,
    mc_mi_discrete,
    quad_mi_pair,
    quad_mi_subsets,
    t_reference,
)
from .special import (
    EULER_GAMMA,
    BracketedValue,
    TSeqContext,
    c_bounds,
    digamma,
    e_bounds,
    harmonic,
    log_factorial,
    t_approx,
    t_step,
    t_step_approx,
    t_value,
)

__version__ = "0.1.0"
