"""Certified total-variation bounds for power-series approximation of
sums of 1-dependent non-negative-integer random variables.

The package has five layers: Panjer/power-series families with their Stein
machinery (``families``), dependent-sequence carriers with exact enumeration
(``sequences``), independent certification engines (``oracle``), the bound
variants (``bounds``), and the run-statistic applications (``runs``).  The
``psdapprox`` console script fronts the published comparison table, bound
evaluation, and the oracle cross-check suite.
"""

from . import errors
from .bounds import (
    BoundReport,
    D_statistic,
    ExactConditionalTerms,
    SmoothingEntry,
    SmoothingEstimate,
    TVInterval,
    bound_crude,
    bound_d1,
    bound_d2,
    bound_min,
    build_smoothing,
    default_delta_g,
    exact_tv,
    m_star,
    smoothing_roellin,
    theorem31_bound,
)
from .families import (
    PMFTable,
    PSDSpec,
    PanjerPSD,
    SteinSolution,
    binomial_family,
    delta_g_exact_sup,
    delta_g_uniform_bound,
    dgm_to_psd,
    family_from_json,
    family_to_json,
    g_norm_bound,
    geometric_family,
    indicator,
    negative_binomial_family,
    pmf_panjer,
    poisson_family,
    stein_apply,
    stein_solve,
)
from .oracle import (
    RunAutomaton,
    brute_force_distribution,
    direct_pattern_count,
    dp_distribution,
    exact_conditional_D,
    k1k2_automaton,
    moment_oracle,
    two_runs_automaton,
)
from .runs import (
    TABLE1_PRINTED,
    K1K2Model,
    K1K2WindowSequence,
    RunsBoundReport,
    TwoRunsModel,
    brown_xia_bound,
    conditional_zero_max,
    k1k2_bound,
    k1k2_ci_star,
    k1k2_moment_set,
    k1k2_moments,
    nb_bound_closed_form,
    nb_fit_from_moments,
    nb_moment_match_2runs,
    smoothing_from_runs_model,
    table1,
    table1_mismatches,
    two_runs_bound,
    two_runs_cbar,
    two_runs_moment_set,
    two_runs_moments,
    two_runs_var,
    window_probability,
)
from .sequences import (
    BernoulliProductSequence,
    BlockedSequence,
    DependentSequence,
    MomentSet,
    NeighborhoodSum,
    block_m_dependent,
    compute_moments,
    dependence_certificate,
    neighborhood_sum,
    register_model,
    sequence_from_json,
)

__version__ = "0.1.0"

__all__ = [
    "BernoulliProductSequence",
    "BlockedSequence",
    "BoundReport",
    "D_statistic",
    "DependentSequence",
    "ExactConditionalTerms",
    "K1K2Model",
    "K1K2WindowSequence",
    "MomentSet",
    "NeighborhoodSum",
    "PMFTable",
    "PSDSpec",
    "PanjerPSD",
    "RunAutomaton",
    "RunsBoundReport",
    "SmoothingEntry",
    "SmoothingEstimate",
    "SteinSolution",
    "TABLE1_PRINTED",
    "TVInterval",
    "TwoRunsModel",
    "binomial_family",
    "block_m_dependent",
    "bound_crude",
    "bound_d1",
    "bound_d2",
    "bound_min",
    "brown_xia_bound",
    "brute_force_distribution",
    "build_smoothing",
    "compute_moments",
    "conditional_zero_max",
    "default_delta_g",
    "delta_g_exact_sup",
    "delta_g_uniform_bound",
    "dependence_certificate",
    "dgm_to_psd",
    "direct_pattern_count",
    "dp_distribution",
    "errors",
    "exact_conditional_D",
    "exact_tv",
    "family_from_json",
    "family_to_json",
    "g_norm_bound",
    "geometric_family",
    "indicator",
    "k1k2_automaton",
    "k1k2_bound",
    "k1k2_ci_star",
    "k1k2_moment_set",
    "k1k2_moments",
    "m_star",
    "moment_oracle",
    "nb_bound_closed_form",
    "nb_fit_from_moments",
    "nb_moment_match_2runs",
    "neighborhood_sum",
    "negative_binomial_family",
    "pmf_panjer",
    "poisson_family",
    "register_model",
    "sequence_from_json",
    "smoothing_from_runs_model",
    "smoothing_roellin",
    "stein_apply",
    "stein_solve",
    "table1",
    "table1_mismatches",
    "theorem31_bound",
    "two_runs_automaton",
    "two_runs_bound",
    "two_runs_cbar",
    "two_runs_moment_set",
    "two_runs_moments",
    "two_runs_var",
    "window_probability",
]
