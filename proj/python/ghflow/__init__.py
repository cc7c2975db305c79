"""Pointed Gromov-Hausdorff estimation and collapsing Ricci-flow experiments."""

from ._ghflow import (  # noqa: F401
    ConfigError,
    DomainError,
    FiniteMetricSpace,
    FlowError,
    GhEstimate,
    HypothesisError,
    NilMetric,
    NilTrace,
    PointedMap,
    RiemannianSample,
    UsageError,
    WarpedSurfaceMetric,
    WarpedTrace,
    check_eps_approximation,
    default_eps_grid,
    gauss_bonnet_total,
    gauss_curvature,
    geodesic_distances,
    gh_brute_force,
    gh_lower_bound,
    gh_upper_bound,
    integrate_nil,
    integrate_warped_surface,
    metric_ball,
    nil_curvature_bound,
    nil_ricci_derivative,
    nil_similarity_form,
    nil_sqrt_form,
    profile_two_plus_cos,
    r_circle_length,
    rebase,
    run_scenario_json,
    run_verify_suite,
    sample_circle,
    sample_warped_torus,
    shrinkage_rate,
    single_source_distances,
    warped_stable_dt,
)

__version__ = "0.1.0"
