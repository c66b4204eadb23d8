"""Eigenvalue processes of the tridiagonal matrix process H_alpha(t)."""
from tridyson.dyson.coefficients import (
    DiffusionCoefficients,
    TwoByTwoReduction,
    coefficient_summary,
    diffusion_coeffs_at,
    drift_at,
    identity_residual_at,
    interaction_derivative,
    interaction_fraction,
    interaction_sum,
    interaction_term,
    ito_drift_at,
    laplacian_at,
    qv_deficit_rate_at,
    qv_rate_at,
    two_by_two_reduction,
)
from tridyson.dyson.collisions import CollisionReport, detect_collisions
from tridyson.dyson.integrate import (
    IntegratedPath,
    integrate_sde_path,
    integrated_qv_rate,
    realized_covariation,
)
from tridyson.dyson.paths import (
    EigenPathSet,
    EigenSnapshot,
    MatrixPath,
    all_ranges,
    drift_ranges,
    eigen_paths,
    simulate_matrix_path,
)

__all__ = [
    "CollisionReport",
    "DiffusionCoefficients",
    "EigenPathSet",
    "EigenSnapshot",
    "IntegratedPath",
    "MatrixPath",
    "TwoByTwoReduction",
    "all_ranges",
    "coefficient_summary",
    "detect_collisions",
    "diffusion_coeffs_at",
    "drift_at",
    "drift_ranges",
    "eigen_paths",
    "identity_residual_at",
    "integrate_sde_path",
    "integrated_qv_rate",
    "interaction_derivative",
    "interaction_fraction",
    "interaction_sum",
    "interaction_term",
    "ito_drift_at",
    "laplacian_at",
    "qv_deficit_rate_at",
    "qv_rate_at",
    "realized_covariation",
    "simulate_matrix_path",
    "two_by_two_reduction",
]
