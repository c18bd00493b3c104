"""Procrustes fitting-error vs. Grassmannian distance for separately reduced data.

When two correlated data sets are dimension-reduced independently (e.g. by
PCA) and then compared by orthogonal Procrustes fitting, the square
fitting-error converges to a convex combination of its maximum 2k and a
(cross-covariance weighted) square distance between the projection
subspaces, mixed by a correlation parameter computed from the covariance
blocks.  This package provides the geometry, the generators, the
closed-form limit quantities, and a Monte Carlo harness with a CLI.
"""

from .grassmann import (
    Subspace,
    apply_isometry,
    hausdorff_sq,
    principal_angles,
    principal_angles_from_projectors,
    projector,
    weighted_hausdorff_sq,
)
from .model import (
    DataPair,
    JointCovariance,
    ScientistParams,
    identity_pair,
    mvn_sample,
    reversed_pair,
    scientists_covariance,
    scientists_sample,
    spiked_diag_pair,
)
from .pca import CenteredData, RankDeficientError, center, pca_subspace, trivial_subspace
from .procrustes import (
    DegenerateProjectionError,
    NormalizedProjection,
    fit_error_sq,
    normalize_projected,
    optimal_rotation,
)
from .sim import (
    ExperimentConfig,
    ReplicateRecord,
    SummaryStats,
    replicate_seed,
    run_experiment,
    run_replicate,
    summarize,
)
from .theory import (
    TheoryParams,
    alpha_prime,
    delta,
    gamma_to_rho,
    plugin_rho,
    predicted_fit_error_sq,
    residual,
    rho,
    theory_params,
)

__version__ = "0.1.0"
