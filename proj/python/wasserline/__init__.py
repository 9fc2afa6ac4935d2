"""Exact one-dimensional Wasserstein distances, dyadic bounds and DPM posterior sampling."""

from ._core import (
    DiscreteMeasure,
    HypothesisError,
    ReferenceDistribution,
    approx_error_bound,
    bound_combined,
    bound_compact,
    bound_unbounded,
    coupling_discrepancy,
    discretize,
    moment_diagnostic,
    run_chain,
    run_study,
    sample,
    tail_mass_diagnostic,
    w1_cdf,
    w1_duality_gap,
    w_infty,
    wasserstein_distance,
    wp_quantile,
    wp_sorted_equal,
)

__all__ = [
    "DiscreteMeasure",
    "HypothesisError",
    "ReferenceDistribution",
    "approx_error_bound",
    "bound_combined",
    "bound_compact",
    "bound_unbounded",
    "coupling_discrepancy",
    "discretize",
    "moment_diagnostic",
    "run_chain",
    "run_study",
    "sample",
    "tail_mass_diagnostic",
    "w1_cdf",
    "w1_duality_gap",
    "w_infty",
    "wasserstein_distance",
    "wp_quantile",
    "wp_sorted_equal",
]
